#include "slipdet/beam_sim.hpp"

#include <algorithm>
#include <cmath>

#include "slipdet/slip_map.hpp"

namespace slipdet::beam {

namespace {

constexpr double kBoundTol = 1e-9;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double diag(const BeamChain& c, std::size_t i) {
  double d = c.b[i];
  if (i > 0) d += c.k;
  if (i + 1 < c.n) d += c.k;
  return d;
}

// (K s)_i without the diagonal term.
double offdiag_product(const BeamChain& c, const std::vector<double>& s, std::size_t i) {
  double v = 0.0;
  if (i > 0) v -= c.k * s[i - 1];
  if (i + 1 < c.n) v -= c.k * s[i + 1];
  return v;
}

// Thomas algorithm; sub/sup may be zero on identity rows.
std::vector<double> solve_tridiagonal(std::vector<double> lo, std::vector<double> di, std::vector<double> up,
                                      std::vector<double> rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - up[i] * x[i + 1]) / di[i];
  return x;
}

}  // namespace

double BeamChain::elastic_energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = position(i);
    const double ai = anchor(i);
    e += 0.5 * b[i] * (xi - ai) * (xi - ai);
    if (i > 0) {
      const double d = xi - position(i - 1);
      e += 0.5 * k * d * d;
    }
  }
  return e;
}

BeamChain make_chain(const ChainParams& p) {
  if (p.nodes < 2) throw DomainError("chain needs at least two beams");
  if (!(p.coupling > 0.0) || !(p.spacing > 0.0) || !(p.mu > 0.0)) throw DomainError("chain parameters must be positive");
  BeamChain c;
  c.n = p.nodes;
  c.k = p.coupling;
  c.spacing = p.spacing;
  c.mu = p.mu;
  c.normal_coupling = p.normal_coupling;
  c.b = p.bending_per_node.empty() ? std::vector<double>(c.n, p.bending) : p.bending_per_node;
  if (c.b.size() != c.n) throw DomainError("bending list length differs from node count");
  for (double bi : c.b)
    if (!(bi > 0.0)) throw DomainError("bending stiffness must be positive");

  c.radial.resize(c.n);
  for (std::size_t i = 0; i < c.n; ++i)
    c.radial[i] = static_cast<double>(c.n - 1 - i) / static_cast<double>(c.n);
  if (!p.normal_per_node.empty()) {
    if (p.normal_per_node.size() != c.n) throw DomainError("normal load list length differs from node count");
    c.fn = p.normal_per_node;
  } else {
    c.fn.resize(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
      const double w = p.profile == LoadProfile::Hertz ? std::sqrt(1.0 - c.radial[i] * c.radial[i]) : 1.0;
      c.fn[i] = p.normal_load * w;
    }
  }
  for (double f : c.fn)
    if (f < 0.0) throw DomainError("negative normal load");
  c.slip.assign(c.n, 0.0);
  c.friction.assign(c.n, 0.0);
  c.state.resize(c.n);
  for (std::size_t i = 0; i < c.n; ++i) c.state[i] = c.fn[i] > 0.0 ? NodeState::Stick : NodeState::NonContact;
  return c;
}

BeamChain quasi_static_step(const BeamChain& chain, double du, double normal_scale, const SolverOptions& opt) {
  if (normal_scale < 0.0) throw DomainError("negative normal scale");
  BeamChain c = chain;
  c.u += du;
  c.normal_scale = normal_scale;
  const std::size_t n = c.n;
  const double eps = opt.tolerance * c.k * c.spacing;

  std::vector<double> drive(n), g(n), kd(n);
  for (std::size_t i = 0; i < n; ++i) {
    drive[i] = c.b[i] * (c.u - c.anchor(i));
    g[i] = c.bound(i);
    kd[i] = diag(c, i);
  }
  const std::vector<double>& prev = chain.slip;
  std::vector<double> s = prev;

  auto force = [&](const std::vector<double>& v, std::size_t i) {
    return drive[i] - offdiag_product(c, v, i) - kd[i] * v[i];
  };

  double residual = 0.0;
  for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = drive[i] - offdiag_product(c, s, i);
      const double trial = r - kd[i] * prev[i];
      s[i] = std::abs(trial) <= g[i] ? prev[i] : prev[i] + (trial - sgn(trial) * g[i]) / kd[i];
    }

    // Exact solve on the current stick/slip partition.
    std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs(n);
    std::vector<double> sigma(n, 0.0);
    std::vector<char> moving(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      moving[i] = s[i] != prev[i] || g[i] == 0.0;
      if (!moving[i]) {
        rhs[i] = prev[i];
        continue;
      }
      sigma[i] = g[i] == 0.0 ? 0.0 : sgn(s[i] - prev[i]);
      di[i] = kd[i];
      if (i > 0) lo[i] = -c.k;
      if (i + 1 < n) up[i] = -c.k;
      rhs[i] = drive[i] - sigma[i] * g[i];
    }
    const std::vector<double> cand = solve_tridiagonal(lo, di, up, rhs);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (moving[i]) {
        if (sigma[i] != 0.0) residual = std::max(residual, -sigma[i] * (cand[i] - prev[i]));
      } else {
        residual = std::max(residual, std::abs(force(cand, i)) - g[i] * (1.0 + 1e-12));
      }
    }
    if (residual <= eps) {
      c.slip = cand;
      for (std::size_t i = 0; i < n; ++i) {
        c.friction[i] = moving[i] ? sigma[i] * g[i] : force(cand, i);
        if (g[i] == 0.0) {
          c.state[i] = NodeState::NonContact;
          c.friction[i] = 0.0;
        } else if (std::abs(c.friction[i]) >= g[i] * (1.0 - kBoundTol)) {
          c.state[i] = NodeState::Slip;
          c.friction[i] = sgn(c.friction[i]) * g[i];
        } else {
          c.state[i] = NodeState::Stick;
        }
      }
      return c;
    }
  }
  throw SolverError("quasi-static solve did not converge", residual);
}

std::vector<double> chain_strain(const std::vector<double>& position, double spacing) {
  const std::size_t n = position.size();
  std::vector<double> e(n, 0.0);
  if (n < 2) return e;
  for (std::size_t i = 1; i < n; ++i) e[i] = (position[i] - position[i - 1]) / spacing;
  e[0] = e[1];
  return e;
}

BeamTrace run_case(const BeamChain& chain, const LoadSchedule& schedule, const SolverOptions& opt) {
  BeamTrace tr;
  tr.n = chain.n;
  tr.spacing = chain.spacing;
  auto record = [&](const BeamChain& c, double work) {
    std::vector<double> x(c.n), fnv(c.n);
    double total = 0.0;
    for (std::size_t i = 0; i < c.n; ++i) {
      x[i] = c.position(i);
      fnv[i] = c.fn[i] * c.normal_scale;
      total += c.friction[i];
    }
    auto eps = chain_strain(x, c.spacing);
    std::vector<double> rate(c.n, 0.0);
    if (!tr.strain.empty())
      for (std::size_t i = 0; i < c.n; ++i) rate[i] = eps[i] - tr.strain.back()[i];
    tr.u.push_back(c.u);
    tr.normal_scale.push_back(c.normal_scale);
    tr.total_force.push_back(total);
    tr.position.push_back(std::move(x));
    tr.strain.push_back(std::move(eps));
    tr.strain_rate.push_back(std::move(rate));
    tr.friction.push_back(c.friction);
    tr.normal.push_back(std::move(fnv));
    tr.state.push_back(c.state);
    tr.drive_work.push_back(work);
    tr.elastic_energy.push_back(c.elastic_energy());
  };

  BeamChain c = chain;
  record(c, 0.0);
  for (const auto& seg : schedule) {
    const double start = c.normal_scale;
    for (std::size_t k = 1; k <= seg.duration; ++k) {
      const double scale = start + (seg.normal_scale - start) * static_cast<double>(k) / static_cast<double>(seg.duration);
      c = quasi_static_step(c, seg.velocity, scale, opt);
      double work = 0.0;
      for (double f : c.friction) work += f * seg.velocity;
      record(c, work);
    }
  }
  return tr;
}

std::vector<DeformationFrame> trace_frames(const BeamTrace& trace, double frame_rate_hz) {
  if (!(frame_rate_hz > 0.0)) throw DomainError("frame rate must be positive");
  std::vector<DeformationFrame> frames;
  for (std::size_t t = 0; t < trace.steps(); ++t) {
    DeformationFrame f;
    f.t = static_cast<double>(t) / frame_rate_hz;
    f.positions = Grid<Vec3>(1, trace.n);
    f.displacements = Grid<Vec3>(1, trace.n);
    f.forces = Grid<Vec3>(1, trace.n);
    for (std::size_t i = 0; i < trace.n; ++i) {
      f.positions(0, i) = {static_cast<double>(i) * trace.spacing, 0.0, 0.0};
      f.displacements(0, i) = {trace.position[t][i], 0.0, 0.0};
      f.forces(0, i) = {trace.friction[t][i], 0.0, -trace.normal[t][i]};
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<SlipMap> trace_truth(const BeamTrace& trace) {
  std::vector<SlipMap> out;
  for (std::size_t t = 0; t < trace.steps(); ++t) {
    Grid<NodeState> g(1, trace.n);
    for (std::size_t i = 0; i < trace.n; ++i) g(0, i) = trace.state[t][i];
    out.push_back(make_slip_map(t, std::move(g)));
  }
  return out;
}

// 2-D lattice

namespace {

struct Lattice {
  std::size_t rows, cols;
  double k, pitch;
  std::vector<double> b, fn, px, py;
  double cx, cy;
  std::size_t idx(std::size_t i, std::size_t j) const { return i * cols + j; }
  double kdiag(std::size_t i, std::size_t j) const {
    double d = b[idx(i, j)];
    if (i > 0) d += k;
    if (i + 1 < rows) d += k;
    if (j > 0) d += k;
    if (j + 1 < cols) d += k;
    return d;
  }
  // (K v)_p for one component.
  double apply(const std::vector<double>& v, std::size_t i, std::size_t j) const {
    const std::size_t p = idx(i, j);
    double r = kdiag(i, j) * v[p];
    if (i > 0) r -= k * v[idx(i - 1, j)];
    if (i + 1 < rows) r -= k * v[idx(i + 1, j)];
    if (j > 0) r -= k * v[idx(i, j - 1)];
    if (j + 1 < cols) r -= k * v[idx(i, j + 1)];
    return r;
  }
};

}  // namespace

LatticeRun lattice_run(const LatticeParams& p, const std::vector<LatticeStep>& schedule, double frame_rate_hz,
                       const SolverOptions& opt) {
  if (p.rows < 1 || p.cols < 1) throw DomainError("empty lattice");
  if (!(p.coupling > 0.0) || !(p.pitch > 0.0) || !(p.bending > 0.0) || !(p.mu > 0.0))
    throw DomainError("lattice parameters must be positive");
  if (!(frame_rate_hz > 0.0)) throw DomainError("frame rate must be positive");

  Lattice L{p.rows, p.cols, p.coupling, p.pitch, {}, {}, {}, {}, 0.0, 0.0};
  const std::size_t n = p.rows * p.cols;
  L.b.assign(n, p.bending);
  L.fn.assign(n, 0.0);
  L.px.resize(n);
  L.py.resize(n);
  L.cx = 0.5 * static_cast<double>(p.cols - 1) * p.pitch;
  L.cy = 0.5 * static_cast<double>(p.rows - 1) * p.pitch;
  const double radius = p.contact_radius > 0.0
                            ? p.contact_radius
                            : 0.5 * static_cast<double>(std::min(p.rows, p.cols)) * p.pitch;
  for (std::size_t i = 0; i < p.rows; ++i) {
    for (std::size_t j = 0; j < p.cols; ++j) {
      const std::size_t q = L.idx(i, j);
      L.px[q] = static_cast<double>(j) * p.pitch;
      L.py[q] = static_cast<double>(i) * p.pitch;
      if (p.profile == LoadProfile::Uniform) {
        L.fn[q] = p.normal_load;
      } else {
        const double rho = std::hypot(L.px[q] - L.cx, L.py[q] - L.cy) / radius;
        L.fn[q] = rho < 1.0 ? p.normal_load * std::sqrt(1.0 - rho * rho) : 0.0;
      }
    }
  }

  std::vector<double> sx(n, 0.0), sy(n, 0.0), Ux(n, 0.0), Uy(n, 0.0);
  std::vector<double> fx(n, 0.0), fy(n, 0.0);
  double tx = 0.0, ty = 0.0, theta = 0.0, scale = 1.0;
  const double eps = opt.tolerance * p.coupling * p.pitch;

  LatticeRun run;
  auto emit = [&](std::size_t frame) {
    DeformationFrame f;
    f.t = static_cast<double>(frame) / frame_rate_hz;
    f.positions = Grid<Vec3>(p.rows, p.cols);
    f.displacements = Grid<Vec3>(p.rows, p.cols);
    f.forces = Grid<Vec3>(p.rows, p.cols);
    Grid<NodeState> st(p.rows, p.cols, NodeState::NonContact);
    std::vector<double> fm(n, 0.0);
    for (std::size_t i = 0; i < p.rows; ++i) {
      for (std::size_t j = 0; j < p.cols; ++j) {
        const std::size_t q = L.idx(i, j);
        f.positions(i, j) = {L.px[q], L.py[q], 0.0};
        f.displacements(i, j) = {Ux[q] - sx[q], Uy[q] - sy[q], 0.0};
        const double g = p.mu * L.fn[q] * scale;
        f.forces(i, j) = {fx[q], fy[q], -L.fn[q] * scale};
        fm[q] = std::hypot(fx[q], fy[q]);
        if (g > 0.0) st(i, j) = fm[q] >= g * (1.0 - 1e-7) ? NodeState::Slip : NodeState::Stick;
      }
    }
    run.frames.push_back(std::move(f));
    run.truth.push_back(make_slip_map(frame, std::move(st)));
    run.friction_magnitude.push_back(std::move(fm));
  };

  emit(0);
  std::size_t frame = 0;
  for (const auto& seg : schedule) {
    const double start = scale;
    for (std::size_t step = 1; step <= seg.duration; ++step) {
      tx += seg.vx;
      ty += seg.vy;
      theta += seg.omega;
      scale = start + (seg.normal_scale - start) * static_cast<double>(step) / static_cast<double>(seg.duration);
      const double c = std::cos(theta), s = std::sin(theta);
      for (std::size_t q = 0; q < n; ++q) {
        const double rx = L.px[q] - L.cx, ry = L.py[q] - L.cy;
        Ux[q] = tx + c * rx - s * ry - rx;
        Uy[q] = ty + s * rx + c * ry - ry;
      }
      std::vector<double> dx(n), dy(n), g(n);
      for (std::size_t i = 0; i < p.rows; ++i)
        for (std::size_t j = 0; j < p.cols; ++j) {
          const std::size_t q = L.idx(i, j);
          dx[q] = L.apply(Ux, i, j);
          dy[q] = L.apply(Uy, i, j);
          g[q] = p.mu * L.fn[q] * scale;
        }
      const std::vector<double> px_prev = sx, py_prev = sy;
      double change = 0.0;
      std::size_t sweep = 0;
      for (; sweep < opt.max_sweeps; ++sweep) {
        change = 0.0;
        for (std::size_t i = 0; i < p.rows; ++i) {
          for (std::size_t j = 0; j < p.cols; ++j) {
            const std::size_t q = L.idx(i, j);
            const double kd = L.kdiag(i, j);
            const double rx = dx[q] - (L.apply(sx, i, j) - kd * sx[q]);
            const double ry = dy[q] - (L.apply(sy, i, j) - kd * sy[q]);
            const double Tx = rx - kd * px_prev[q], Ty = ry - kd * py_prev[q];
            const double T = std::hypot(Tx, Ty);
            double nx = px_prev[q], ny = py_prev[q];
            if (T > g[q]) {
              const double a = (T - g[q]) / (kd * T);
              nx += a * Tx;
              ny += a * Ty;
            }
            change = std::max(change, std::max(std::abs(nx - sx[q]), std::abs(ny - sy[q])));
            sx[q] = nx;
            sy[q] = ny;
          }
        }
        if (change <= eps * 1e-3) break;
      }
      if (sweep == opt.max_sweeps) throw SolverError("lattice solve did not converge", change);
      for (std::size_t i = 0; i < p.rows; ++i)
        for (std::size_t j = 0; j < p.cols; ++j) {
          const std::size_t q = L.idx(i, j);
          fx[q] = dx[q] - L.apply(sx, i, j);
          fy[q] = dy[q] - L.apply(sy, i, j);
        }
      emit(++frame);
    }
  }
  return run;
}

}  // namespace slipdet::beam
