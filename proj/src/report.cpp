#include "mpnet/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mpnet/io.hpp"

namespace mpnet {

namespace {

constexpr const char* kRecordsHeader =
    "subset_vx0_kmh,restart,iteration,sigma,best_index,best_seed,cand_n_solved,cand_p_star,accepted,n_solved,p_star";
constexpr const char* kSummaryHeader = "subset_vx0_kmh,n_tasks,n_param,wall_seconds";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  std::string text = buf;
  // Values that round to zero print without a sign.
  if (text[0] == '-' && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
  return text;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<SubsetReport>& reports) {
  out << kRecordsHeader << '\n';
  for (const auto& [key, rep] : reports) {
    const std::string k = format_double(key);
    std::size_t at = 0;
    for (std::size_t r = 0; r < rep.restarts.size(); ++r) {
      const Score& init = rep.restarts[r].initial;
      out << k << ',' << r << ",-1,0,-1,0," << init.n_solved << ',' << format_double(init.p_star) << ",1,"
          << init.n_solved << ',' << format_double(init.p_star) << '\n';
      for (; at < rep.records.size() && rep.records[at].restart == static_cast<int>(r); ++at) {
        const IterationRecord& rec = rep.records[at];
        out << k << ',' << rec.restart << ',' << rec.iteration << ',' << format_double(rec.sigma) << ','
            << rec.best_index << ',' << rec.best_seed << ',' << rec.best_candidate.n_solved << ','
            << format_double(rec.best_candidate.p_star) << ',' << (rec.accepted ? 1 : 0) << ','
            << rec.incumbent.n_solved << ',' << format_double(rec.incumbent.p_star) << '\n';
      }
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SubsetReport>& reports) {
  out << kSummaryHeader << '\n';
  for (const auto& [key, rep] : reports) {
    out << format_double(key) << ',' << rep.n_tasks << ',' << rep.n_param << ',' << format_double(rep.wall_seconds)
        << '\n';
  }
}

std::vector<SubsetReport> read_reports(std::istream& records_csv, std::istream& summary_csv) {
  std::string line;
  if (!std::getline(summary_csv, line) || line != kSummaryHeader) throw std::runtime_error("summary.csv: bad header");
  std::vector<SubsetReport> reports;
  std::map<std::string, std::size_t> index;
  int line_no = 1;
  try {
    while (std::getline(summary_csv, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 4) throw std::runtime_error("expected 4 columns");
      TrainReport rep;
      rep.n_tasks = static_cast<int>(parse_int(c[1]));
      rep.n_param = static_cast<std::size_t>(parse_int(c[2]));
      rep.wall_seconds = parse_double(c[3]);
      if (index.count(c[0])) throw std::runtime_error("duplicate subset " + c[0]);
      index[c[0]] = reports.size();
      reports.emplace_back(parse_double(c[0]), rep);
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("summary.csv line " + std::to_string(line_no) + ": " + e.what());
  }
  if (reports.empty()) throw std::runtime_error("summary.csv has no rows");

  if (!std::getline(records_csv, line) || line != kRecordsHeader) throw std::runtime_error("records.csv: bad header");
  line_no = 1;
  try {
    while (std::getline(records_csv, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 11) throw std::runtime_error("expected 11 columns");
      const auto it = index.find(c[0]);
      if (it == index.end()) throw std::runtime_error("subset " + c[0] + " missing from summary.csv");
      TrainReport& rep = reports[it->second].second;
      const int restart = static_cast<int>(parse_int(c[1]));
      const int iteration = static_cast<int>(parse_int(c[2]));
      const Score incumbent{static_cast<int>(parse_int(c[9])), parse_double(c[10])};
      if (iteration < 0) {
        if (restart != static_cast<int>(rep.restarts.size())) throw std::runtime_error("restarts out of order");
        RestartSummary s;
        s.initial = incumbent;
        s.final = incumbent;
        if (rep.n_tasks > 0 && incumbent.n_solved == rep.n_tasks) s.first_all_solved_p_star = incumbent.p_star;
        rep.restarts.push_back(s);
        continue;
      }
      if (rep.restarts.empty() || restart != static_cast<int>(rep.restarts.size()) - 1) {
        throw std::runtime_error("iteration row without its restart row");
      }
      IterationRecord rec;
      rec.restart = restart;
      rec.iteration = iteration;
      rec.sigma = parse_double(c[3]);
      rec.best_index = static_cast<int>(parse_int(c[4]));
      rec.best_seed = static_cast<std::uint32_t>(parse_int(c[5]));
      rec.best_candidate = {static_cast<int>(parse_int(c[6])), parse_double(c[7])};
      rec.accepted = parse_int(c[8]) != 0;
      rec.incumbent = incumbent;
      rep.records.push_back(rec);
      RestartSummary& s = rep.restarts.back();
      s.final = incumbent;
      if (rep.n_tasks > 0 && incumbent.n_solved == rep.n_tasks && !s.first_all_solved_p_star) {
        s.first_all_solved_p_star = incumbent.p_star;
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": " + e.what());
  }

  for (auto& [key, rep] : reports) {
    if (rep.restarts.empty()) throw std::runtime_error("records.csv has no rows for subset " + format_double(key));
    rep.best = rep.restarts[0].final;
    rep.best_restart = 0;
    rep.n_rest_star = 0;
    for (std::size_t r = 0; r < rep.restarts.size(); ++r) {
      const Score& f = rep.restarts[r].final;
      if (rep.n_tasks > 0 && f.n_solved == rep.n_tasks) ++rep.n_rest_star;
      if (score_better(f, rep.best)) {
        rep.best = f;
        rep.best_restart = static_cast<int>(r);
      }
    }
    const RestartSummary& b = rep.restarts[static_cast<std::size_t>(rep.best_restart)];
    rep.dp_first_pct.reset();
    if (b.first_all_solved_p_star) rep.dp_first_pct = p_star_gain_pct(*b.first_all_solved_p_star, b.final.p_star);
  }
  return reports;
}

std::string render_markdown(const std::vector<SubsetReport>& reports) {
  std::ostringstream out;
  out << "| v_x0 [km/h] | N_tasks | N_tasks* | P* [m] | N_param | T_learn [s] | N_rest* | dP*_1st |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& [key, rep] : reports) {
    out << "| " << (key < 0.0 ? std::string("all") : fixed(key, 1)) << " | " << rep.n_tasks << " | "
        << rep.best.n_solved << " | " << fixed(rep.best.p_star, 1) << " | " << rep.n_param << " | "
        << fixed(rep.wall_seconds, 1) << " | " << rep.n_rest_star << "/" << rep.restarts.size() << " | "
        << (rep.dp_first_pct ? fixed(*rep.dp_first_pct, 1) + "%" : std::string("--")) << " |\n";
  }
  return out.str();
}

void write_trajectory_csv(std::ostream& out, const RolloutResult& result) {
  out << "time,x,y,phi,vx,vy,omega_phi,a0,a1\n";
  for (const TrajectoryPoint& p : result.trajectory) {
    out << format_double(p.t) << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
        << format_double(p.phi) << ',' << format_double(p.vx) << ',' << format_double(p.vy) << ','
        << format_double(p.omega_phi) << ',' << format_double(p.a0) << ',' << format_double(p.a1) << '\n';
  }
  out << "# solved=" << (result.solved ? "true" : "false") << " steps=" << result.steps
      << " pathlen=" << format_double(result.pathlen) << '\n';
}

}  // namespace mpnet
