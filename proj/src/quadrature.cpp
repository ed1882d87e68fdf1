#include "ggl/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace ggl {

namespace {

class Simpson {
 public:
  Simpson(const VectorIntegrand& f, std::size_t width, std::size_t budget, int max_depth)
      : f_(f), w_(width), budget_(budget), max_depth_(max_depth) {}

  QuadratureResult run(double a, double b, double tol) {
    QuadratureResult res;
    res.value.assign(w_, 0.0);
    ok_ = true;
    // A uniform first split keeps narrow peaks from hiding between the five
    // initial nodes.
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    std::vector<double> fa = eval(a);
    for (int p = 0; p < kPanels; ++p) {
      const double lo = a + h * p;
      const double hi = p + 1 == kPanels ? b : lo + h;
      std::vector<double> fb = eval(hi), fm = eval(0.5 * (lo + hi));
      std::vector<double> whole = simpson(lo, hi, fa, fm, fb);
      recurse(lo, hi, fa, fm, fb, whole, tol / kPanels, 0, res);
      fa = std::move(fb);
    }
    res.evaluations = evals_;
    res.converged = ok_;
    return res;
  }

 private:
  std::vector<double> eval(double s) {
    std::vector<double> out(w_);
    f_(s, out.data());
    ++evals_;
    return out;
  }

  std::vector<double> simpson(double a, double b, const std::vector<double>& fa, const std::vector<double>& fm,
                              const std::vector<double>& fb) const {
    std::vector<double> r(w_);
    const double h = (b - a) / 6.0;
    for (std::size_t k = 0; k < w_; ++k) r[k] = h * (fa[k] + 4.0 * fm[k] + fb[k]);
    return r;
  }

  void recurse(double a, double b, const std::vector<double>& fa, const std::vector<double>& fm,
               const std::vector<double>& fb, const std::vector<double>& whole, double tol, int depth,
               QuadratureResult& res) {
    const double m = 0.5 * (a + b);
    std::vector<double> flm = eval(0.5 * (a + m));
    std::vector<double> frm = eval(0.5 * (m + b));
    std::vector<double> left = simpson(a, m, fa, flm, fm);
    std::vector<double> right = simpson(m, b, fm, frm, fb);
    double err = 0.0;
    for (std::size_t k = 0; k < w_; ++k) err = std::max(err, std::abs(left[k] + right[k] - whole[k]));
    const bool budget_left = evals_ + 2 <= budget_;
    if (err <= 15.0 * tol || depth >= max_depth_ || !budget_left) {
      if (err > 15.0 * tol) ok_ = false;
      for (std::size_t k = 0; k < w_; ++k) {
        res.value[k] += left[k] + right[k] + (left[k] + right[k] - whole[k]) / 15.0;
      }
      res.error_estimate += err / 15.0;
      return;
    }
    recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, res);
    recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, res);
  }

  const VectorIntegrand& f_;
  std::size_t w_;
  std::size_t budget_;
  int max_depth_;
  std::size_t evals_ = 0;
  bool ok_ = true;
};

}  // namespace

QuadratureResult adaptive_simpson(const VectorIntegrand& f, std::size_t width, double a, double b,
                                  double abs_tol, std::size_t max_evaluations, int max_depth) {
  Simpson s(f, width, max_evaluations, max_depth);
  return s.run(a, b, abs_tol);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        bool* converged) {
  VectorIntegrand vf = [&](double s, double* out) { out[0] = f(s); };
  QuadratureResult r = adaptive_simpson(vf, 1, a, b, abs_tol);
  if (converged) *converged = r.converged;
  return r.value[0];
}

double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i < panels; ++i) sum += f(a + h * static_cast<double>(i));
  return sum * h;
}

}  // namespace ggl
