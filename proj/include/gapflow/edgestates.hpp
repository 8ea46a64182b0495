#ifndef GAPFLOW_EDGESTATES_HPP
#define GAPFLOW_EDGESTATES_HPP

#include <optional>
#include <vector>

#include "gapflow/transfer.hpp"
#include "gapflow/types.hpp"

namespace gapflow {

// Observable supported on the integer window [b, a].
struct LocalObservable {
  int b = 0;
  int a = 0;
  Matrix A;  // n^(a-b+1) square

  int width() const { return a - b + 1; }
};

enum class Side { Left, Right };

struct EdgeStateSpec {
  Side side = Side::Right;
  Matrix omega;  // k x k density matrix
};

// All ordered products B_{mu_1} ... B_{mu_w} over length-w multi-indices,
// enumerated big-endian (first site is the most significant digit).
std::vector<Matrix> site_products(const KrausTuple& B, int w);

// R^B(A) = sum <psi_mu, A psi_nu> B_mu e B_nu^*  (window anchored at 0);
// L^B(A) = sum <psi_mu, A psi_nu> B_nu^* rho B_mu (window ending at -1).
Matrix boundary_map(const KrausTuple& B, const SpectralData& sd, Side side,
                    const LocalObservable& obs);

Complex edge_state_eval(const KrausTuple& B, const SpectralData& sd,
                        const EdgeStateSpec& spec, const LocalObservable& obs);

Complex bulk_state_eval(const KrausTuple& B, const SpectralData& sd,
                        const LocalObservable& obs);

// Max modulus of the state applied to translates of the parent interaction;
// bulk when spec is absent.
double frustration_check(const KrausTuple& B, int m,
                         const std::optional<EdgeStateSpec>& spec,
                         int shift_range);

struct DecayRow {
  int N = 0;
  double d = 0.0;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  double K = 0.0;       // fitted prefactor, first row times safety factor 10
  double lambda2 = 0.0;
  bool pass = false;    // d(N) <= K lambda2^(N-a) throughout
};

DecayTable boundary_limit_check(const KrausTuple& B, const Matrix& C,
                                const LocalObservable& obs,
                                const std::vector<int>& N_list);

// Rank of A -> R^B(A) on the matrix-unit basis of the length-a window.
int surjectivity_check(const KrausTuple& B, int a);

}  // namespace gapflow

#endif
