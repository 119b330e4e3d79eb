#ifndef RECOV_IO_HPP
#define RECOV_IO_HPP

// JSON for states, channels, reports and SDP dumps.
//
// Complex matrices are flat row-major lists of [re, im] pairs. Doubles are written
// with round-trip precision, so save/load reproduces a state bit for bit.
// Non-finite reals are written as the strings "inf", "-inf" and "nan".

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "recov/recovery.hpp"
#include "recov/sdp.hpp"

namespace recov {

using Json = nlohmann::json;

Json real_to_json(double x);
double real_from_json(const Json& j);

Json matrix_to_json(const ComplexMatrix& m);
/// Throws std::invalid_argument unless j holds rows * cols pairs.
ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols);

/// {dims, matrix}
Json state_to_json(const DensityMatrix& rho);
DensityMatrix state_from_json(const Json& j);

/// {dim_in, dim_out, out_dims, choi}; out_dims is optional on input.
Json channel_to_json(const Channel& chan);
Channel channel_from_json(const Json& j);

Json report_to_json(const RecoveryReport& r);
RecoveryReport report_from_json(const Json& j);

/// Block sizes, objective and constraint triples, and optionally the solution
/// summary with its iterate history.
Json sdp_to_json(const SdpProblem& p);
Json sdp_to_json(const SdpProblem& p, const SdpSolution& s);
SdpProblem sdp_problem_from_json(const Json& j);

/// File helpers; throw std::runtime_error on I/O or parse failures.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
DensityMatrix load_state(const std::filesystem::path& path);
void save_state(const std::filesystem::path& path, const DensityMatrix& rho);

}  // namespace recov

#endif  // RECOV_IO_HPP
