#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pulab/jekyll_hyde.hpp"

namespace pulab {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
/// Strict parse of a whole field; throws std::invalid_argument.
double parse_double(const std::string& text);

/// Header `seed,rule,eta,setting,env,steps,censored`.
void write_runs_csv(std::ostream& out, std::span<const RunRecord> records);
/// Header `seed,rule,eta,step,jbar`, one row per checkpoint.
void write_curves_csv(std::ostream& out, std::span<const RunRecord> records);

/// Reads runs.csv; curves stay empty. Throws std::invalid_argument on malformed input.
std::vector<RunRecord> read_runs_csv(std::istream& in);
/// Reads runs.csv and attaches the curves of curves.csv, matched on (seed, rule, eta).
std::vector<RunRecord> read_records(std::istream& runs, std::istream& curves);

}  // namespace pulab
