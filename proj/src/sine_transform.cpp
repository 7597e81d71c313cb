#include "spdelab/sine_transform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

// FFTW planning is not thread-safe; execution with fresh arrays is.
// FFTW_ESTIMATE keeps the chosen algorithm (and therefore the rounding) fixed.
fftw_plan shared_plan(std::size_t length)
{
    static std::mutex mutex;
    static std::map<std::size_t, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(length);
    if (it != plans.end()) return it->second;
    double* in = fftw_alloc_real(length);
    fftw_complex* out = fftw_alloc_complex(length / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(length), in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) fail(ErrorCode::InvalidArgument, "FFTW could not plan a transform of this size");
    plans.emplace(length, plan);
    return plan;
}

}  // namespace

struct SineTransform::Buffers {
    explicit Buffers(std::size_t intervals)
        : plan(shared_plan(2 * intervals)),
          real(fftw_alloc_real(2 * intervals)),
          spectrum(fftw_alloc_complex(intervals + 1))
    {
    }
    ~Buffers()
    {
        fftw_free(real);
        fftw_free(spectrum);
    }
    Buffers(const Buffers&) = delete;
    Buffers& operator=(const Buffers&) = delete;

    fftw_plan plan;
    double* real;
    fftw_complex* spectrum;
};

SineTransform::SineTransform(std::size_t intervals, double length)
    : intervals_(intervals)
{
    require(intervals >= 2, "sine transform needs M >= 2");
    require(length > 0.0, "sine transform needs a positive length");
    const double m = static_cast<double>(intervals);
    // Im(FFT of the odd extension)_k = -2 sum_j g_j sin(pi j k / M).
    forward_scale_ = -std::sqrt(2.0 * length) / (2.0 * m);
    inverse_scale_ = -std::sqrt(2.0 / length) / 2.0;
    buffers_ = std::make_unique<Buffers>(intervals);
}

SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

void SineTransform::forward(std::span<const double> nodes, std::span<double> coeffs)
{
    const std::size_t m = intervals_;
    require(nodes.size() == m + 1, "sine transform: node count does not match the grid");
    require(coeffs.size() <= m - 1, "sine transform: more coefficients than interior nodes");
    double* r = buffers_->real;
    r[0] = 0.0;
    r[m] = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
        r[j] = nodes[j];
        r[2 * m - j] = -nodes[j];
    }
    fftw_execute_dft_r2c(buffers_->plan, r, buffers_->spectrum);
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = forward_scale_ * buffers_->spectrum[k + 1][1];
}

void SineTransform::inverse(std::span<const double> coeffs, std::span<double> nodes)
{
    const std::size_t m = intervals_;
    require(nodes.size() == m + 1, "sine transform: node count does not match the grid");
    require(coeffs.size() <= m - 1, "sine transform: more coefficients than interior nodes");
    double* r = buffers_->real;
    const std::size_t n = coeffs.size();
    r[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        r[k + 1] = coeffs[k];
        r[2 * m - k - 1] = -coeffs[k];
    }
    for (std::size_t i = n + 1; i < 2 * m - n; ++i) r[i] = 0.0;
    fftw_execute_dft_r2c(buffers_->plan, r, buffers_->spectrum);
    nodes[0] = 0.0;
    nodes[m] = 0.0;
    for (std::size_t j = 1; j < m; ++j) nodes[j] = inverse_scale_ * buffers_->spectrum[j][1];
}

}  // namespace spdelab
