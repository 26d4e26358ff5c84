#include "fractlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fractlab/errors.hpp"

namespace fractlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string measure_to_json(const GridMeasure& mu) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["dim"] = mu.dim();
  j["step"] = mu.step().str();
  nlohmann::ordered_json origin = nlohmann::ordered_json::array();
  for (int a = 0; a < mu.dim(); ++a) origin.push_back(mu.origin()[a].str());
  j["origin"] = origin;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const auto& [i, m] : mu.cells()) {
    nlohmann::ordered_json idx = nlohmann::ordered_json::array();
    for (int a = 0; a < mu.dim(); ++a) idx.push_back(i[a]);
    cells.push_back(nlohmann::ordered_json::array({idx, format_double(m)}));
  }
  j["cells"] = cells;
  if (mu.provenance()) {
    const auto& p = *mu.provenance();
    nlohmann::ordered_json prov;
    prov["type"] = "cantor";
    prov["base"] = p.base;
    prov["digits"] = p.digits;
    prov["levels"] = p.levels;
    if (p.seed)
      prov["seed"] = *p.seed;
    else
      prov["seed"] = nullptr;
    j["provenance"] = prov;
  }
  return j.dump(1) + "\n";
}

GridMeasure measure_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("version") || j["version"].get<int>() != 1)
    throw ValidationError("measure: unsupported version");
  int dim = j["dim"].get<int>();
  Rational step = Rational::parse(j["step"].get<std::string>());
  std::array<Rational, 3> origin{Rational(0), Rational(0), Rational(0)};
  for (int a = 0; a < dim; ++a) origin[a] = Rational::parse(j["origin"][a].get<std::string>());
  std::vector<std::pair<Idx, double>> cells;
  for (const auto& c : j["cells"]) {
    Idx i{0, 0, 0};
    for (int a = 0; a < dim; ++a) i[a] = c[0][a].get<std::int64_t>();
    cells.push_back({i, std::stod(c[1].get<std::string>())});
  }
  GridMeasure mu(dim, step, origin, std::move(cells));
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    CantorSpec spec;
    spec.base = p["base"].get<int>();
    spec.digits = p["digits"].get<std::vector<int>>();
    spec.levels = p["levels"].get<int>();
    if (!p["seed"].is_null()) spec.seed = p["seed"].get<std::uint64_t>();
    mu.set_provenance(spec);
  }
  return mu;
}

GridMeasure load_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open measure file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return measure_from_json(ss.str());
}

void save_measure(const GridMeasure& mu, const std::filesystem::path& path) {
  atomic_write(path, measure_to_json(mu));
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t k = s.find(sep, pos);
    if (k == std::string::npos) {
      parts.push_back(s.substr(pos));
      return parts;
    }
    parts.push_back(s.substr(pos, k - pos));
    pos = k + sep.size();
  }
}

}  // namespace

std::vector<Rational> parse_scale_ladder(const std::string& text) {
  std::vector<Rational> out;
  if (text.find("..") != std::string::npos) {
    auto ends = split(text, "..");
    if (ends.size() != 2) throw ValidationError("scale ladder: expected a..b");
    auto parse_pow = [](const std::string& s) -> std::pair<std::int64_t, int> {
      auto caret = s.find('^');
      if (caret == std::string::npos)
        throw ValidationError("scale ladder endpoints must be of the form base^-k");
      return {std::stoll(s.substr(0, caret)), std::stoi(s.substr(caret + 1))};
    };
    auto [b1, e1] = parse_pow(ends[0]);
    auto [b2, e2] = parse_pow(ends[1]);
    if (b1 != b2) throw ValidationError("scale ladder: endpoints must share a base");
    if (e1 <= e2) {
      for (int e = e1; e <= e2; ++e) out.push_back(Rational::pow(b1, e));
    } else {
      for (int e = e1; e >= e2; --e) out.push_back(Rational::pow(b1, e));
    }
  } else {
    for (const auto& part : split(text, ","))
      if (!part.empty()) out.push_back(Rational::parse(part));
  }
  if (out.empty()) throw ValidationError("scale ladder: empty");
  for (std::size_t k = 1; k < out.size(); ++k)
    if (!(out[k] < out[k - 1]))
      throw ValidationError("scale ladder: must be strictly decreasing");
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV: " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ",");
    if (first) {
      t.header = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  return t;
}

}  // namespace fractlab
