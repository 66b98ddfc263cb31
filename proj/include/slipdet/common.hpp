#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace slipdet {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct MacroSlipError : DomainError {
  using DomainError::DomainError;
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct SequencingError : std::logic_error {
  using std::logic_error::logic_error;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnsupportedInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DegenerateDesignError : std::runtime_error {
  DegenerateDesignError(const std::string& what, std::string regressor)
      : std::runtime_error(what), regressor(std::move(regressor)) {}
  std::string regressor;
};

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Row-major rows x cols field.
template <class T>
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(std::size_t r, std::size_t c) const { return rows == r && cols == c; }
  template <class U>
  bool same_shape(const Grid<U>& o) const { return rows == o.rows && cols == o.cols; }
};

enum class NodeState : unsigned char { NonContact = 0, Stick = 1, Slip = 2 };

const char* to_string(NodeState s);

struct DeformationFrame {
  double t = 0.0;
  Grid<Vec3> positions;
  Grid<Vec3> displacements;
  Grid<Vec3> forces;           // empty when absent
  Grid<unsigned char> contact;  // empty when absent

  std::size_t rows() const { return positions.rows; }
  std::size_t cols() const { return positions.cols; }
  bool has_forces() const { return forces.size() > 0; }
  bool has_contact_mask() const { return contact.size() > 0; }
};

struct SlipMap {
  std::size_t frame = 0;
  Grid<NodeState> states;
  std::size_t stick_count = 0;
  std::size_t slip_count = 0;
  std::size_t contact_count = 0;
  double ratio = 0.0;
  bool ratio_defined = false;
};

}  // namespace slipdet
