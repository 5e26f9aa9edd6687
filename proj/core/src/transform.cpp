#include "spde/transform.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "spde/errors.hpp"

namespace spde {
namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// fftw_execute_r2r on a plan is thread safe; planning is not.
std::mutex g_plan_mutex;
std::map<std::pair<int, std::size_t>, Plan> g_plans;

fftw_plan plan_for(fftw_r2r_kind kind, std::size_t n) {
  std::lock_guard lock(g_plan_mutex);
  auto key = std::make_pair(static_cast<int>(kind), n);
  auto it = g_plans.find(key);
  if (it != g_plans.end()) return it->second.get();
  std::vector<double> a(n), b(n);
  fftw_plan p = fftw_plan_r2r_1d(static_cast<int>(n), a.data(), b.data(), kind,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p) throw InternalError("fftw plan creation failed");
  g_plans.emplace(key, Plan(p));
  return p;
}

void run(fftw_r2r_kind kind, std::span<const double> in, std::span<double> out) {
  if (in.size() != out.size()) throw DomainError("transform size mismatch");
  if (in.empty()) return;
  fftw_plan p = plan_for(kind, in.size());
  // FFTW never writes the input of an out-of-place r2r plan.
  fftw_execute_r2r(p, const_cast<double*>(in.data()), out.data());
}

}  // namespace

void dst1(std::span<const double> in, std::span<double> out) { run(FFTW_RODFT00, in, out); }

void dct1(std::span<const double> in, std::span<double> out) {
  if (in.size() < 2) throw DomainError("dct1 needs at least two points");
  run(FFTW_REDFT00, in, out);
}

}  // namespace spde
