#include "spfit/csv.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace spfit {

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, end);
}

void write_row(std::ostream& out, std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (std::string_view field : fields) {
    if (!first) out << ',';
    out << field;
    first = false;
  }
  out << '\n';
}

void write_error_table_csv(std::ostream& out, const ErrorTable& table) {
  const std::string mesh(mesh_kind_name(table.mesh.kind));
  const std::string scheme(scheme_name(table.scheme));
  const std::string seed = std::to_string(table.seed);
  write_row(out, {"eps", "N", "mesh", "scheme", "seed", "error", "order", "c_hat"});
  for (std::size_t i = 0; i < table.eps_grid.size(); ++i) {
    for (std::size_t k = 0; k < table.n_grid.size(); ++k) {
      write_row(out, {format_double(table.eps_grid[i]), std::to_string(table.n_grid[k]), mesh, scheme,
                      seed, format_double(table.errors[i][k]), "", ""});
    }
  }
  const OrderReport orders = uniform_order(table);
  const std::string c_hat = format_double(orders.c_hat);
  for (std::size_t k = 0; k < table.n_grid.size(); ++k) {
    const bool has_order = k < orders.orders.size() && orders.orders[k].has_value();
    write_row(out, {"uniform", std::to_string(table.n_grid[k]), mesh, scheme, seed,
                    format_double(table.uniform_errors[k]),
                    has_order ? format_double(*orders.orders[k]) : std::string(), c_hat});
  }
}

void write_solution_csv(std::ostream& out, const DiscreteSolution& U, const SolutionFunction& u) {
  write_row(out, {"t", "U", "u", "abs_error"});
  const auto nodes = U.mesh().nodes();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double exact = u(nodes[j]);
    write_row(out, {format_double(nodes[j]), format_double(U[j]), format_double(exact),
                    format_double(std::abs(U[j] - exact))});
  }
}

void write_decomposition_csv(std::ostream& out, const DiscreteSolution& U,
                             const DiscreteDecomposition& parts, const Decomposition& exact) {
  write_row(out, {"t", "U", "V", "W", "v", "w"});
  const auto nodes = U.mesh().nodes();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double t = nodes[j];
    write_row(out, {format_double(t), format_double(U[j]), format_double(parts.smooth[j]),
                    format_double(parts.singular[j]), format_double(exact.smooth(t)),
                    format_double(exact.singular(t))});
  }
}

}  // namespace spfit
