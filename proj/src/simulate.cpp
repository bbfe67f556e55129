#include "frailtycr/simulate.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "frailtycr/io_json.hpp"
#include "frailtycr/parallel.hpp"
#include "frailtycr/rng.hpp"
#include "frailtycr/version.hpp"

namespace frailtycr {

namespace {

PairRecord simulate_one(const ModelSpec& m, RngStream& rng, long& redraws) {
  const int L1 = m.num_causes(1), L2 = m.num_causes(2);
  for (;;) {
    const FrailtyDraw draw = sample_frailty(m.frailty, L1, L2, rng);
    PairRecord rec;
    bool ok = true;
    for (int k = 1; k <= 2 && ok; ++k) {
      const auto& eps = (k == 1) ? draw.eps1 : draw.eps2;
      const double target = rng.exponential();
      const double t = total_inverse(m.hazards, k, eps, target);
      const auto& causes = m.hazards.causes(k);
      double total = 0.0;
      std::vector<double> weights(causes.size());
      for (std::size_t j = 0; j < causes.size(); ++j)
        total += weights[j] = hazard_value(causes[j], t) * eps[j];
      if (!(total > 0.0)) {
        // Only reachable when every hazard vanishes at the drawn time (e.g.
        // Weibull shape > 1 exactly at t = 0), a probability-zero corner.
        ok = false;
        break;
      }
      double u = rng.uniform() * total;
      int cause = static_cast<int>(causes.size());
      for (std::size_t j = 0; j < causes.size(); ++j) {
        u -= weights[j];
        if (u <= 0.0) {
          cause = static_cast<int>(j) + 1;
          break;
        }
      }
      if (k == 1) {
        rec.t1 = t;
        rec.j1 = cause;
      } else {
        rec.t2 = t;
        rec.j2 = cause;
      }
    }
    if (ok) return rec;
    ++redraws;
  }
}

}  // namespace

Dataset simulate_pairs(const ModelSpec& m, long n, std::uint64_t seed, int threads) {
  validate_model(m);
  if (n < 1) throw ParameterError("simulate_pairs requires n >= 1");

  Dataset ds;
  ds.records.resize(static_cast<std::size_t>(n));
  ds.meta.tool_version = kVersion;
  ds.meta.model_json = model_to_compact_string(m);
  ds.meta.seed = seed;
  ds.meta.n = n;

  std::atomic<long> redraws{0};
  parallel_chunks(n, threads, [&](long begin, long end, int) {
    long local_redraws = 0;
    for (long i = begin; i < end; ++i) {
      RngStream rng = RngStream::derived(seed, static_cast<std::uint64_t>(i));
      ds.records[static_cast<std::size_t>(i)] = simulate_one(m, rng, local_redraws);
    }
    redraws += local_redraws;
  });
  ds.meta.redraws = redraws.load();
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << "# frailtycr " << (ds.meta.tool_version.empty() ? kVersion : ds.meta.tool_version)
      << "\n";
  out << "# model: " << (ds.meta.model_json.empty() ? "{}" : ds.meta.model_json) << "\n";
  out << "# seed: " << ds.meta.seed << "\n";
  out << "# n: " << ds.meta.n << "\n";
  if (ds.meta.redraws > 0) out << "# redraws: " << ds.meta.redraws << "\n";
  out << "t1,j1,t2,j2\n";
  char buf[128];
  for (const auto& rec : ds.records) {
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%.17g,%d\n", rec.t1, rec.j1, rec.t2, rec.j2);
    out << buf;
  }
  if (!out) throw ParseError("write failed: " + path);
}

namespace {

Dataset read_dataset_impl(const std::string& path, int L1, int L2) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  Dataset ds;
  std::string line;
  long line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon != std::string::npos) {
        const std::string key = line.substr(2, colon - 2);
        const std::string value = line.substr(colon + 2);
        if (key == "model")
          ds.meta.model_json = value;
        else if (key == "seed")
          ds.meta.seed = std::strtoull(value.c_str(), nullptr, 10);
        else if (key == "n")
          ds.meta.n = std::strtol(value.c_str(), nullptr, 10);
        else if (key == "redraws")
          ds.meta.redraws = std::strtol(value.c_str(), nullptr, 10);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "t1,j1,t2,j2" && line.rfind("t1,j1,t2,j2,", 0) != 0)
        throw ParseError("expected header 't1,j1,t2,j2'", line_no);
      header_seen = true;
      continue;
    }
    PairRecord rec;
    char extra[64];
    const int fields = std::sscanf(line.c_str(), "%lg,%d,%lg,%d%63s", &rec.t1, &rec.j1, &rec.t2,
                                   &rec.j2, extra);
    if (fields < 4) throw ParseError("malformed row (expected t1,j1,t2,j2)", line_no);
    if (fields == 5 && extra[0] != ',')
      throw ParseError("malformed row (unexpected trailing characters)", line_no);
    if (!(rec.t1 > 0.0) || !(rec.t2 > 0.0) || !std::isfinite(rec.t1) || !std::isfinite(rec.t2))
      throw ParseError("times must be positive and finite", line_no);
    if (rec.j1 < 1 || (L1 > 0 && rec.j1 > L1))
      throw ParseError("cause index j1 out of range", line_no);
    if (rec.j2 < 1 || (L2 > 0 && rec.j2 > L2))
      throw ParseError("cause index j2 out of range", line_no);
    ds.records.push_back(rec);
  }
  if (!header_seen) throw ParseError("missing header 't1,j1,t2,j2'", line_no);
  if (ds.meta.n == 0) ds.meta.n = static_cast<long>(ds.records.size());
  return ds;
}

}  // namespace

Dataset read_dataset(const std::string& path) { return read_dataset_impl(path, 0, 0); }

Dataset read_dataset(const std::string& path, int L1, int L2) {
  return read_dataset_impl(path, L1, L2);
}

}  // namespace frailtycr
