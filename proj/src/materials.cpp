#include "nanopair/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nanopair/error.hpp"

namespace nanopair::materials {

namespace detail {
extern const char* const kAlgaasTable;
}

namespace {

// Fritsch-Carlson tangents for a monotone piecewise-cubic Hermite interpolant.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);

  std::vector<double> m(n);
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    m[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (delta[i] == 0.0) {
      m[i] = 0.0;
      m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / delta[i];
    const double b = m[i + 1] / delta[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m[i] = t * a * delta[i];
      m[i + 1] = t * b * delta[i];
    }
  }
  return m;
}

double hermite(double x0, double x1, double y0, double y1, double m0, double m1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * m1;
}

}  // namespace

DispersionModel::DispersionModel(std::string material_id, std::vector<DispersionSample> samples)
    : id_(std::move(material_id)), samples_(std::move(samples)) {
  if (samples_.size() < 2) {
    throw ValidationError("dispersion table '" + id_ + "' needs at least 2 samples");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!std::isfinite(s.wavelength_nm) || !std::isfinite(s.index.real()) ||
        !std::isfinite(s.index.imag())) {
      throw ValidationError("dispersion table '" + id_ + "' has a non-finite entry");
    }
    if (s.index.imag() < 0.0) {
      throw ValidationError("dispersion table '" + id_ + "' has Im(n) < 0 (active medium)");
    }
    if (i > 0 && !(s.wavelength_nm > samples_[i - 1].wavelength_nm)) {
      throw ValidationError("dispersion table '" + id_ +
                            "' wavelengths must be strictly increasing");
    }
  }
  std::vector<double> x, re, im;
  for (const auto& s : samples_) {
    x.push_back(s.wavelength_nm);
    re.push_back(s.index.real());
    im.push_back(s.index.imag());
  }
  slope_re_ = monotone_slopes(x, re);
  slope_im_ = monotone_slopes(x, im);
}

cplx DispersionModel::index_at(double wavelength_nm) const {
  if (!(wavelength_nm >= min_wavelength_nm() && wavelength_nm <= max_wavelength_nm())) {
    std::ostringstream msg;
    msg << "wavelength " << wavelength_nm << " nm outside table '" << id_ << "' span ["
        << min_wavelength_nm() << ", " << max_wavelength_nm() << "] nm";
    throw RangeError(msg.str());
  }
  auto it = std::upper_bound(samples_.begin(), samples_.end(), wavelength_nm,
                             [](double v, const DispersionSample& s) { return v < s.wavelength_nm; });
  std::size_t i = (it == samples_.begin()) ? 0 : static_cast<std::size_t>(it - samples_.begin()) - 1;
  if (i + 1 >= samples_.size()) i = samples_.size() - 2;
  const auto& a = samples_[i];
  const auto& b = samples_[i + 1];
  if (wavelength_nm == a.wavelength_nm) return a.index;
  if (wavelength_nm == b.wavelength_nm) return b.index;
  const double re = hermite(a.wavelength_nm, b.wavelength_nm, a.index.real(), b.index.real(),
                            slope_re_[i], slope_re_[i + 1], wavelength_nm);
  const double im = hermite(a.wavelength_nm, b.wavelength_nm, a.index.imag(), b.index.imag(),
                            slope_im_[i], slope_im_[i + 1], wavelength_nm);
  return {re, std::max(im, 0.0)};
}

cplx refractive_index(const DispersionModel& model, double wavelength_nm) {
  return model.index_at(wavelength_nm);
}

DispersionModel parse_dispersion_table(std::istream& in, std::string material_id) {
  std::vector<DispersionSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double lambda = 0, n_re = 0, n_im = 0;
    if (!(fields >> lambda)) continue;  // blank or comment-only line
    if (!(fields >> n_re >> n_im)) {
      throw ParseError("dispersion table line " + std::to_string(line_no) +
                           ": expected 'wavelength_nm n_real n_imag'",
                       line_no);
    }
    std::string extra;
    if (fields >> extra) {
      throw ParseError("dispersion table line " + std::to_string(line_no) + ": trailing data",
                       line_no);
    }
    samples.push_back({lambda, {n_re, n_im}});
  }
  return DispersionModel(std::move(material_id), std::move(samples));
}

DispersionModel load_dispersion_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dispersion table " + path.string());
  return parse_dispersion_table(in, path.stem().string());
}

const DispersionModel& algaas_x018() {
  static const DispersionModel model = [] {
    std::istringstream in(detail::kAlgaasTable);
    return parse_dispersion_table(in, "Al0.18Ga0.82As");
  }();
  return model;
}

DispersionModel constant_index(std::string material_id, cplx index, double min_wavelength_nm,
                               double max_wavelength_nm) {
  return DispersionModel(std::move(material_id),
                         {{min_wavelength_nm, index}, {max_wavelength_nm, index}});
}

CVec3 Chi2Tensor::contract(const CVec3& a, const CVec3& b) const {
  CVec3 out = CVec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double chi = (*this)(i, j, k);
        if (chi != 0.0) out[i] += chi * a[j] * b[k];
      }
  return out;
}

Chi2Tensor chi2_tensor(double d14_pm_per_v, const Mat3& rotation) {
  const double err = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-9)) {
    throw ValidationError("crystal rotation is not orthonormal (|R R^T - I| = " +
                          std::to_string(err) + ")");
  }
  Chi2Tensor crystal;
  const double chi = 2.0 * d14_pm_per_v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (i != j && j != k && i != k) crystal(i, j, k) = chi;

  Chi2Tensor lab;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double sum = 0.0;
        for (int l = 0; l < 3; ++l)
          for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n)
              sum += rotation(i, l) * rotation(j, m) * rotation(k, n) * crystal(l, m, n);
        lab(i, j, k) = sum;
      }
  lab.set_crystal_rotation(rotation);
  return lab;
}

}  // namespace nanopair::materials
