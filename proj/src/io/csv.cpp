#include "saem/io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace saem::io {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) fields.push_back(trim(item));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return d;
  } catch (const std::exception&) {
    throw DataFormatError(path + ":" + std::to_string(line_no) + ": cannot parse `" + s +
                          "` as a number");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open data file: " + path);
  return in;
}

void expect_header(std::ifstream& in, const std::string& expected, const std::string& path) {
  std::string header;
  if (!std::getline(in, header)) throw DataFormatError(path + ": empty file");
  if (trim(header) != expected) {
    throw DataFormatError(path + ": expected header `" + expected + "`, got `" + trim(header) +
                          "`");
  }
}

std::ofstream create_or_throw(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataFormatError("cannot write file: " + path);
  return out;
}

}  // namespace

refmodels::CensoredData load_censored_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "value,censored", path);
  refmodels::CensoredData data;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw DataFormatError(path + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    refmodels::CensoredObservation obs;
    obs.value = parse_double(fields[0], path, line_no);
    if (fields[1] == "0") {
      obs.censored = false;
    } else if (fields[1] == "1") {
      obs.censored = true;
    } else {
      throw DataFormatError(path + ":" + std::to_string(line_no) +
                            ": censored flag must be 0 or 1");
    }
    data.push_back(obs);
  }
  return data;
}

std::vector<double> load_values_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "value", path);
  std::vector<double> values;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    values.push_back(parse_double(trim(line), path, line_no));
  }
  return values;
}

refmodels::BivariateData load_bivariate_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "x1,x2", path);
  refmodels::BivariateData data;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw DataFormatError(path + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    refmodels::BivariatePair pair;
    if (fields[0] != "NA") pair.x1 = parse_double(fields[0], path, line_no);
    if (fields[1] != "NA") pair.x2 = parse_double(fields[1], path, line_no);
    if (!pair.x1 && !pair.x2) {
      throw DataFormatError(path + ":" + std::to_string(line_no) +
                            ": both coordinates missing");
    }
    data.push_back(pair);
  }
  return data;
}

void write_censored_csv(const std::string& path, const refmodels::CensoredData& data) {
  std::ofstream out = create_or_throw(path);
  out << "value,censored\n";
  for (const auto& obs : data) {
    out << fmt17(obs.value) << ',' << (obs.censored ? 1 : 0) << '\n';
  }
}

void write_values_csv(const std::string& path, const std::vector<double>& values) {
  std::ofstream out = create_or_throw(path);
  out << "value\n";
  for (double v : values) out << fmt17(v) << '\n';
}

void write_bivariate_csv(const std::string& path, const refmodels::BivariateData& data) {
  std::ofstream out = create_or_throw(path);
  out << "x1,x2\n";
  for (const auto& pair : data) {
    out << (pair.x1 ? fmt17(*pair.x1) : "NA") << ',' << (pair.x2 ? fmt17(*pair.x2) : "NA")
        << '\n';
  }
}

void write_trace_csv(const std::string& path, const Trace& trace) {
  std::ofstream out = create_or_throw(path);
  const Eigen::Index p = trace.empty() ? 0 : trace.front().theta.size();
  out << "iter,gamma";
  for (Eigen::Index j = 1; j <= p; ++j) out << ",theta_" << j;
  out << ",step_norm,accept_rate,gamma_regularized\n";
  for (const TraceRecord& r : trace) {
    out << r.iter << ',' << fmt17(r.gamma);
    for (Eigen::Index j = 0; j < p; ++j) out << ',' << fmt17(r.theta[j]);
    out << ',' << fmt17(r.step_norm) << ',' << fmt17(r.accept_rate) << ','
        << (r.gamma_regularized ? 1 : 0) << '\n';
  }
}

}  // namespace saem::io
