#include "adiabatic/io.hpp"

#include "adiabatic/errors.hpp"

#include <cstdio>
#include <sstream>

namespace adiabatic::io {

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto dim = field<long>(j, "dim");
  if (dim < 1) throw ConfigError("matrix 'dim' must be >= 1");
  const auto rows = field<std::vector<std::vector<double>>>(j, "rows");
  if (rows.size() != static_cast<std::size_t>(dim)) throw ConfigError("matrix has wrong row count");
  Eigen::MatrixXd m(dim, dim);
  for (long i = 0; i < dim; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (r.size() != static_cast<std::size_t>(dim)) throw ConfigError("matrix row has wrong length");
    for (long k = 0; k < dim; ++k) m(i, k) = r[static_cast<std::size_t>(k)];
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return json{{"dim", m.rows()}, {"rows", std::move(rows)}};
}

StochasticMatrix kernel_from_json(const json& j) { return StochasticMatrix(matrix_from_json(j)); }

Generator generator_from_json(const json& j) { return Generator(matrix_from_json(j)); }

Distribution distribution_from_json(const json& j) {
  const auto w = field<std::vector<double>>(j, "weights");
  if (w.empty()) throw ConfigError("distribution has no weights");
  return Distribution(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
}

json distribution_to_json(const Distribution& d) {
  return json{{"weights", std::vector<double>(d.weights().data(), d.weights().data() + d.dim())}};
}

Schedule schedule_from_json(const json& j) {
  const auto kind = field<std::string>(j, "kind");
  if (kind == "linear") return Schedule::linear();
  if (kind == "poly_flat") return Schedule::poly_flat(field<int>(j, "m"));
  if (kind == "glauber") {
    return Schedule::glauber(field<double>(j, "a"), field<double>(j, "beta1"),
                             field<double>(j, "beta2"));
  }
  if (kind == "sampled") {
    return Schedule::sampled(field<std::vector<std::array<double, 2>>>(j, "knots"));
  }
  throw ConfigError("unknown schedule kind '" + kind + "'");
}

json schedule_to_json(const Schedule& phi) {
  switch (phi.kind()) {
    case ScheduleKind::linear:
      return json{{"kind", "linear"}};
    case ScheduleKind::poly_flat:
      return json{{"kind", "poly_flat"}, {"m", phi.poly_order()}};
    case ScheduleKind::glauber: {
      const auto p = phi.glauber_parameters();
      return json{{"kind", "glauber"}, {"a", p[0]}, {"beta1", p[1]}, {"beta2", p[2]}};
    }
    case ScheduleKind::sampled:
      return json{{"kind", "sampled"}, {"knots", phi.knots()}};
    default:
      throw ValidationError("schedule kind '" + to_string(phi.kind()) + "' has no JSON form");
  }
}

TorusConfig torus_from_json(const json& j) {
  TorusConfig t;
  t.n = field<int>(j, "n");
  t.d = field<int>(j, "d");
  t.beta1 = field<double>(j, "beta1");
  t.beta2 = field<double>(j, "beta2");
  if (j.contains("per_site_rate")) t.per_site_rate = field<double>(j, "per_site_rate");
  return t;
}

json torus_to_json(const TorusConfig& t) {
  return json{{"n", t.n}, {"d", t.d}, {"beta1", t.beta1}, {"beta2", t.beta2},
              {"per_site_rate", t.per_site_rate}};
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
  if (!out_) throw Error("cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw Error("CSV row has the wrong number of fields");
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out_ << ',';
    out_ << quote(fields[k]);
  }
  out_ << '\n';
  out_.flush();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const char c = line[k];
      if (quoted) {
        if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
          cur += '"';
          ++k;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(std::move(cur));
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace adiabatic::io
