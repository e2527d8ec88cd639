#pragma once

#include <ostream>
#include <string>
#include <string_view>

#include "spfit/analysis.hpp"
#include "spfit/scheme.hpp"

namespace spfit {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Writes one comma separated row.
void write_row(std::ostream& out, std::initializer_list<std::string_view> fields);

/// Error table as CSV, header `eps,N,mesh,scheme,seed,error,order,c_hat`.
/// Data rows are eps-major, N-minor and leave order/c_hat empty; one
/// `uniform` summary row per N follows with E^N in the error column.
void write_error_table_csv(std::ostream& out, const ErrorTable& table);

/// `t,U,u,abs_error`, one row per node.
void write_solution_csv(std::ostream& out, const DiscreteSolution& U, const SolutionFunction& u);

/// `t,U,V,W,v,w`, one row per node.
void write_decomposition_csv(std::ostream& out, const DiscreteSolution& U,
                             const DiscreteDecomposition& parts, const Decomposition& exact);

}  // namespace spfit
