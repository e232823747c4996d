#include "cubres/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cubres/errors.hpp"

namespace cubres {

namespace {

long interior_count(const GridConfig& cfg) {
  return std::lround(2.0 * cfg.half_width / cfg.spacing) - 1;
}

}  // namespace

void GridConfig::validate() const {
  if (!(half_width > 0.0) || !(spacing > 0.0) || !std::isfinite(half_width)) {
    throw DomainError("grid needs L > 0 and dq > 0");
  }
  if (!(time_step > 0.0) || !std::isfinite(time_step)) throw DomainError("grid needs dt > 0");
  const double cells = 2.0 * half_width / spacing;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells || cells < 2.0) {
    throw DomainError("2L/dq must be an integer number of cells");
  }
}

std::vector<double> GridConfig::points() const {
  validate();
  const long n = interior_count(*this);
  std::vector<double> q(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = -half_width + spacing * static_cast<double>(i + 1);
  return q;
}

CrankNicolson::CrankNicolson(const GridConfig& cfg, double g_root) : cfg_(cfg), q_(cfg.points()) {
  if (!std::isfinite(g_root)) throw DomainError("coupling must be finite");
  const double dt = cfg.time_step, dq = cfg.spacing;
  const Complex half{0.0, 0.5 * dt};
  off_ = half * (-0.5 / (dq * dq));
  const std::size_t n = q_.size();
  rhs_diag_.resize(n);
  cprime_.resize(n);
  denom_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = q_[i];
    const double h = 1.0 / (dq * dq) + 0.5 * x * x + g_root * x * x * x;
    rhs_diag_[i] = 1.0 - half * h;
    const Complex a = 1.0 + half * h;
    const Complex d = i == 0 ? a : a - off_ * cprime_[i - 1];
    if (std::abs(d) < 1e-300) throw NumericalError("Crank-Nicolson tridiagonal system is singular");
    denom_[i] = d;
    cprime_[i] = off_ / d;
  }
}

void CrankNicolson::step(std::vector<Complex>& psi) const {
  const std::size_t n = q_.size();
  if (psi.size() != n) throw DomainError("sample count does not match the grid");
  // right-hand side and forward sweep in one pass; psi is overwritten with d'
  Complex prev_old{};  // psi_{i-1} before overwrite
  Complex prev_d{};
  for (std::size_t i = 0; i < n; ++i) {
    const Complex cur = psi[i];
    const Complex next = i + 1 < n ? psi[i + 1] : Complex{};
    const Complex r = rhs_diag_[i] * cur - off_ * (prev_old + next);
    const Complex d = (r - (i == 0 ? Complex{} : off_ * prev_d)) / denom_[i];
    prev_old = cur;
    psi[i] = d;
    prev_d = d;
  }
  for (std::size_t i = n - 1; i-- > 0;) psi[i] -= cprime_[i] * psi[i + 1];
}

std::vector<Complex> cn_step(const std::vector<Complex>& samples, const GridConfig& cfg, double g_root) {
  CrankNicolson cn(cfg, g_root);
  std::vector<Complex> out = samples;
  cn.step(out);
  return out;
}

CnResult cn_autocorrelation(const PacketState& packet, const std::vector<double>& times,
                            const GridConfig& cfg, double g_root) {
  cfg.validate();
  const double dt = cfg.time_step;
  std::vector<long> steps;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (!(t >= 0.0)) throw DomainError("times must be nonnegative");
    if (i > 0 && t < times[i - 1]) throw DomainError("times must be increasing");
    const long k = std::lround(t / dt);
    if (std::abs(static_cast<double>(k) * dt - t) > 1e-9 * std::max(1.0, t)) {
      std::ostringstream msg;
      msg << "time " << t << " is not a multiple of dt = " << dt;
      throw DomainError(msg.str());
    }
    steps.push_back(k);
  }

  const CrankNicolson cn(cfg, g_root);
  const auto& q = cn.grid();
  const std::vector<Complex> psi0 = packet_samples(packet, q);
  std::vector<Complex> psi = psi0;
  const double dq = cfg.spacing;
  const double edge = 0.95 * cfg.half_width;
  auto norm2 = [&](const std::vector<Complex>& v) {
    double s = 0.0;
    for (const Complex& x : v) s += std::norm(x);
    return s * dq;
  };
  const double n0 = norm2(psi0);

  CnResult out;
  long done = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (; done < steps[i]; ++done) cn.step(psi);
    Complex ov{};
    double amp = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      ov += std::conj(psi[j]) * psi0[j];
      if (std::abs(q[j]) >= edge) amp = std::max(amp, std::abs(psi[j]));
    }
    ov *= dq;
    out.edge_amplitude = std::max(out.edge_amplitude, amp);
    AutocorrelationPoint pt;
    pt.t = times[i];
    pt.overlap = ov;
    pt.p = std::norm(ov);
    pt.modal_norm = norm2(psi);
    out.trace.push_back(pt);
  }
  const double p0 = n0 * n0;  // |<psi0|psi0>|^2
  for (auto& pt : out.trace) pt.p_normalized = p0 > 0.0 ? pt.p / p0 : 0.0;
  out.boundary_warning = out.edge_amplitude > 1e-6;
  out.norm_loss = n0 > 0.0 ? 1.0 - norm2(psi) / n0 : 0.0;
  return out;
}

}  // namespace cubres
