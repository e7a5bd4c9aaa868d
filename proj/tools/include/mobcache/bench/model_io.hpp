#pragma once

#include <string>
#include <variant>

#include "mobcache/mobility.hpp"
#include "mobcache/model.hpp"

namespace mobcache::bench {

// Fitted-model and placement files. All are plain CSV with a header line:
//   transition.csv     from_cell,to_cell,prob
//   cell_stats.csv     cell,initial_prob,mean_sojourn_s
//   contact_rates.csv  user_a,user_b,rate_per_s   (upper triangle, nonzero)
//   placement.csv      node,file,fraction         (nonzero entries)

void write_transition_model(const CellTransitionModel& model, const std::string& transition_path,
                            const std::string& cell_stats_path);
CellTransitionModel read_transition_model(const std::string& transition_path,
                                          const std::string& cell_stats_path);

void write_contact_model(const ContactModel& model, const std::string& path);
ContactModel read_contact_model(const std::string& path, std::size_t num_users);

using AnyPlacement = std::variant<CodedPlacement, DiscretePlacement>;

void write_placement(const CodedPlacement& placement, const std::string& path);
void write_placement(const DiscretePlacement& placement, const std::string& path);

/// Loads a placement; entries that are all 0/1 come back discrete.
AnyPlacement read_placement(const std::string& path, std::size_t num_nodes, std::size_t num_files);

AssociationTrace read_association_trace_file(const std::string& path);
ContactTrace read_contact_trace_file(const std::string& path);
void write_association_trace(const AssociationTrace& trace, const std::string& path);
void write_contact_trace(const ContactTrace& trace, const std::string& path);

}  // namespace mobcache::bench
