#include "mobcache/bench/model_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mobcache::bench {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Numeric triples `a,b,c` with an optional header; comments allowed.
std::vector<std::array<double, 3>> read_triples(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::array<double, 3>> rows;
  std::string line;
  bool seen_data = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',')) continue;
    if (!std::getline(ss, b, ',') || !std::getline(ss, c)) {
      if (!seen_data) continue;  // short header line
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected 3 fields");
    }
    std::array<double, 3> row{};
    try {
      row = {std::stod(a), std::stod(b), std::stod(c)};
    } catch (const std::exception&) {
      if (!seen_data) continue;  // header
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": bad number");
    }
    seen_data = true;
    rows.push_back(row);
  }
  return rows;
}

std::size_t as_index(double v, const std::string& path) {
  if (v < 0.0 || std::floor(v) != v) throw std::runtime_error(path + ": bad index");
  return static_cast<std::size_t>(v);
}

}  // namespace

void write_transition_model(const CellTransitionModel& model, const std::string& transition_path,
                            const std::string& cell_stats_path) {
  auto t = open_out(transition_path);
  t << "from_cell,to_cell,prob\n";
  for (std::size_t a = 0; a < model.num_cells; ++a)
    for (std::size_t b = 0; b < model.num_cells; ++b)
      t << a << ',' << b << ',' << fmt(model.transition[a][b]) << '\n';

  auto c = open_out(cell_stats_path);
  c << "cell,initial_prob,mean_sojourn_s\n";
  for (std::size_t a = 0; a < model.num_cells; ++a)
    c << a << ',' << fmt(model.initial[a]) << ',' << fmt(model.mean_sojourn_s[a]) << '\n';
}

CellTransitionModel read_transition_model(const std::string& transition_path,
                                          const std::string& cell_stats_path) {
  const auto stats = read_triples(cell_stats_path);
  if (stats.empty()) throw std::runtime_error(cell_stats_path + ": empty");
  CellTransitionModel model;
  model.num_cells = stats.size();
  model.initial.assign(model.num_cells, 0.0);
  model.mean_sojourn_s.assign(model.num_cells, 1.0);
  for (const auto& row : stats) {
    const std::size_t cell = as_index(row[0], cell_stats_path);
    if (cell >= model.num_cells) throw std::runtime_error(cell_stats_path + ": cell out of range");
    model.initial[cell] = row[1];
    model.mean_sojourn_s[cell] = row[2];
  }
  model.transition.assign(model.num_cells, std::vector<double>(model.num_cells, 0.0));
  for (const auto& row : read_triples(transition_path)) {
    const std::size_t a = as_index(row[0], transition_path);
    const std::size_t b = as_index(row[1], transition_path);
    if (a >= model.num_cells || b >= model.num_cells)
      throw std::runtime_error(transition_path + ": cell out of range");
    model.transition[a][b] = row[2];
  }
  for (const auto& row : model.transition) {
    double sum = 0.0;
    for (double p : row) sum += p;
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::runtime_error(transition_path + ": row does not sum to 1");
  }
  return model;
}

void write_contact_model(const ContactModel& model, const std::string& path) {
  auto out = open_out(path);
  out << "user_a,user_b,rate_per_s\n";
  for (std::size_t i = 0; i < model.num_users; ++i)
    for (std::size_t j = i + 1; j < model.num_users; ++j)
      if (model.rate[i][j] != 0.0) out << i << ',' << j << ',' << fmt(model.rate[i][j]) << '\n';
}

ContactModel read_contact_model(const std::string& path, std::size_t num_users) {
  const auto rows = read_triples(path);
  std::size_t max_user = 0;
  for (const auto& row : rows)
    max_user = std::max({max_user, as_index(row[0], path), as_index(row[1], path)});
  ContactModel model;
  model.num_users = std::max(num_users, rows.empty() ? num_users : max_user + 1);
  if (model.num_users == 0) throw std::runtime_error(path + ": no users");
  model.rate.assign(model.num_users, std::vector<double>(model.num_users, 0.0));
  for (const auto& row : rows) {
    const std::size_t a = as_index(row[0], path);
    const std::size_t b = as_index(row[1], path);
    if (a == b) throw std::runtime_error(path + ": self-contact rate");
    if (row[2] < 0.0) throw std::runtime_error(path + ": negative rate");
    model.rate[a][b] = model.rate[b][a] = row[2];
  }
  return model;
}

void write_placement(const CodedPlacement& placement, const std::string& path) {
  auto out = open_out(path);
  out << "node,file,fraction\n";
  for (std::size_t n = 0; n < placement.num_nodes(); ++n)
    for (std::size_t f = 0; f < placement.num_files(); ++f)
      if (placement.x[n][f] != 0.0) out << n << ',' << f << ',' << fmt(placement.x[n][f]) << '\n';
}

void write_placement(const DiscretePlacement& placement, const std::string& path) {
  auto out = open_out(path);
  out << "node,file,fraction\n";
  for (std::size_t n = 0; n < placement.num_nodes(); ++n)
    for (std::size_t f = 0; f < placement.num_files(); ++f)
      if (placement.stored[n][f]) out << n << ',' << f << ",1\n";
}

AnyPlacement read_placement(const std::string& path, std::size_t num_nodes, std::size_t num_files) {
  CodedPlacement coded;
  coded.x.assign(num_nodes, std::vector<double>(num_files, 0.0));
  bool discrete = true;
  for (const auto& row : read_triples(path)) {
    const std::size_t n = as_index(row[0], path);
    const std::size_t f = as_index(row[1], path);
    if (n >= num_nodes || f >= num_files)
      throw std::runtime_error(path + ": placement entry out of range");
    if (row[2] < 0.0 || row[2] > 1.0) throw std::runtime_error(path + ": fraction outside [0,1]");
    coded.x[n][f] = row[2];
    if (row[2] != 0.0 && row[2] != 1.0) discrete = false;
  }
  if (!discrete) return coded;
  DiscretePlacement p;
  p.stored.assign(num_nodes, std::vector<std::uint8_t>(num_files, 0));
  for (std::size_t n = 0; n < num_nodes; ++n)
    for (std::size_t f = 0; f < num_files; ++f) p.stored[n][f] = coded.x[n][f] == 1.0 ? 1 : 0;
  return p;
}

AssociationTrace read_association_trace_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_association_trace(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

ContactTrace read_contact_trace_file(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_contact_trace(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_association_trace(const AssociationTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "user_id,cell_id,enter_s,exit_s\n";
  for (const auto& r : trace.records)
    out << r.user << ',' << r.cell << ',' << fmt(r.enter_s) << ',' << fmt(r.exit_s) << '\n';
}

void write_contact_trace(const ContactTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "user_a,user_b,start_s,end_s\n";
  for (const auto& r : trace.records)
    out << r.user_a << ',' << r.user_b << ',' << fmt(r.start_s) << ',' << fmt(r.end_s) << '\n';
}

}  // namespace mobcache::bench
