#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "duelbench/environments.hpp"
#include "duelbench/errors.hpp"

namespace duelbench {

namespace fs = std::filesystem;

EnvironmentTrace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open trace file " + path);
  long long horizon = 0, k = 0;
  std::string kind;
  if (!(in >> horizon >> k >> kind) || horizon < 1 || k < 1) {
    throw ArgumentError("trace file: expected header 'T K' followed by SEGMENTS or EXPLICIT");
  }

  if (kind == "EXPLICIT") {
    std::vector<PreferenceMatrix> rounds;
    rounds.reserve(static_cast<std::size_t>(horizon));
    for (long long t = 0; t < horizon; ++t) {
      rounds.push_back(read_matrix(in));
      if (rounds.back().k() != static_cast<std::size_t>(k)) {
        throw ArgumentError(fmt::format("trace file: round {} matrix has wrong K", t + 1));
      }
    }
    return EnvironmentTrace::from_matrices(std::move(rounds));
  }

  if (kind == "SEGMENTS") {
    long long n = 0;
    if (!(in >> n) || n < 1) throw ArgumentError("trace file: bad segment count");
    const fs::path base = fs::path(path).parent_path();
    std::vector<std::pair<Round, PreferenceMatrix>> segments;
    for (long long s = 0; s < n; ++s) {
      long long start = 0;
      std::string file;
      if (!(in >> start >> file)) throw ArgumentError("trace file: truncated segment list");
      const fs::path matrix_path = fs::path(file).is_absolute() ? fs::path(file) : base / file;
      PreferenceMatrix m = read_matrix_file(matrix_path.string());
      if (m.k() != static_cast<std::size_t>(k)) {
        throw ArgumentError("trace file: segment matrix " + file + " has wrong K");
      }
      segments.emplace_back(start, std::move(m));
    }
    return EnvironmentTrace::piecewise(horizon, std::move(segments));
  }

  throw ArgumentError("trace file: unknown provider '" + kind + "'");
}

void write_trace_file(const std::string& path, const EnvironmentTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write trace file " + path);
  out << trace.horizon() << ' ' << trace.k() << '\n';
  if (trace.is_piecewise()) {
    const auto& segments = trace.segments();
    out << "SEGMENTS " << segments.size() << '\n';
    const fs::path target(path);
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const std::string name = fmt::format("{}.seg{}.txt", target.filename().string(), s);
      std::ofstream m((target.parent_path() / name).string());
      if (!m) throw ArgumentError("cannot write matrix file " + name);
      write_matrix(m, trace.matrices()[segments[s].matrix]);
      out << segments[s].start << ' ' << name << '\n';
    }
    return;
  }
  out << "EXPLICIT\n";
  for (Round t = 1; t <= trace.horizon(); ++t) write_matrix(out, trace.at(t));
}

}  // namespace duelbench
