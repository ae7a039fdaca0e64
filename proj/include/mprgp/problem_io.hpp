#pragma once

#include "mprgp/problem.hpp"

#include <string>

namespace mprgp {

/// QP problem document: {"n": int, "A": row-major n*n reals,
/// "b": [n], "l": [n]|null, "u": [n]|null, "G": row-major m*n|null,
/// "e": [m]|null}. Matrix fields accept either a flat row-major array
/// or an array of rows; bound arrays accept the strings "inf"/"-inf".
/// null means the bound or constraint block is absent.
BoxQp problem_from_json(const std::string& text);
BoxQp load_problem(const std::string& path);

std::string problem_to_json(const BoxQp& problem, const Matrix& dense_hessian);

}  // namespace mprgp
