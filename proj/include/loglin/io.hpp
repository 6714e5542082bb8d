#pragma once

#include <iosfwd>
#include <string>

#include "loglin/estimators.hpp"
#include "loglin/graph.hpp"
#include "loglin/sampling.hpp"
#include "loglin/theta.hpp"

namespace loglin {

// Graph: header line "#vertices n", then one "u v" pair per line.
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in, const std::string& name = "<graph>");
void write_graph_file(const std::string& path, const Graph& g);
Graph read_graph_file(const std::string& path);

// Contingency table: CSV with header "cell,count"; cells encoded as
// comma-free digit strings when every |I_v| <= 10, colon-separated
// otherwise. A leading "# levels l0,l1,..." comment makes the file
// self-describing.
void write_table_csv(std::ostream& out, const ContingencyTable& table);
ContingencyTable read_table_csv(std::istream& in, const std::string& name = "<table>");
void write_table_file(const std::string& path, const ContingencyTable& table);
ContingencyTable read_table_file(const std::string& path);

// Per-individual records: "# levels ..." comment then one encoded cell
// per line.
void write_samples(std::ostream& out, const SampleSet& samples);
SampleSet read_samples(std::istream& in, const std::string& name = "<samples>");
void write_samples_file(const std::string& path, const SampleSet& samples);
SampleSet read_samples_file(const std::string& path);

// Theta: JSON object {theta0: number, entries: [{cell: string, value:
// number}]} keyed by the JSet cell encoding.
std::string theta_to_json(const ThetaVector& theta, const JSet& jset);
ThetaVector theta_from_json(const std::string& text, const JSet& jset);
void write_theta_file(const std::string& path, const ThetaVector& theta, const JSet& jset);
ThetaVector read_theta_file(const std::string& path, const JSet& jset);

// Estimate report as JSON (method, existence, entries with sources,
// diagnostics). `provenance_json`, when nonempty, is embedded verbatim
// under "invocation" so reports are self-describing.
std::string report_to_json(const EstimateReport& report, const JSet& jset,
                           const std::string& provenance_json = "");
void write_report_file(const std::string& path, const EstimateReport& report,
                       const JSet& jset, const std::string& provenance_json = "");

}  // namespace loglin
