#include "fve/harness.hpp"

namespace fve {

// Published convergence columns used by --check-reference. The eight
// h1x-ultra columns share one mesh family per order block; the four
// super-norm columns all use the full-coefficient problem.
const ReferenceTable& ReferenceTable::builtin() {
  static const ReferenceTable table = [] {
    ReferenceTable t;
    const std::vector<int> n3 = {12, 16, 20, 24};
    const std::vector<int> n4 = {8, 12, 16, 20};
    t.rows_ = {
        {"FVE-3-3", "bvp-dr", "h1x-ultra", n3,
         {2.9363e-06, 6.9806e-07, 2.2896e-07, 9.2071e-08},
         {4.9937, 4.9956, 4.9967}},
        {"FVE-3-2", "bvp-d", "h1x-ultra", n3,
         {2.9634e-05, 9.4196e-06, 3.8683e-06, 1.8686e-06},
         {3.9840, 3.9884, 3.9909}},
        {"FVE-3-4", "bvp-d", "h1x-ultra", n3,
         {1.1170e-06, 2.6538e-07, 8.7028e-08, 3.4993e-08},
         {4.9957, 4.9965, 4.9971}},
        {"FE-3", "bvp-d", "h1x-ultra", n3,
         {3.0922e-06, 9.3570e-07, 3.7495e-07, 1.7861e-07},
         {4.1551, 4.0983, 4.0673}},
        {"FVE-4-4", "bvp-dr", "h1x-ultra", n4,
         {3.0479e-07, 2.6831e-08, 4.7817e-09, 1.2659e-09},
         {5.9933, 5.9954, 5.9557}},
        {"FVE-4-3", "bvp-d", "h1x-ultra", n4,
         {3.7555e-06, 4.8851e-07, 1.1519e-07, 3.7590e-08},
         {5.0303, 5.0220, 5.0186}},
        {"FVE-4-6", "bvp-d", "h1x-ultra", n4,
         {1.0251e-07, 9.1740e-09, 1.6476e-09, 4.4636e-10},
         {5.9527, 5.9685, 5.8526}},
        {"FE-4", "bvp-d", "h1x-ultra", n4,
         {3.3702e-07, 4.1182e-08, 9.4836e-09, 3.0657e-09},
         {5.1845, 5.1044, 5.0608}},
        {"FVE-3-2", "bvp-dqr", "h1x-super", n3,
         {1.6249e-04, 5.1237e-05, 2.0937e-05, 1.0080e-05},
         {4.0119, 4.0106, 4.0093}},
        {"FVE-3-3", "bvp-dqr", "l2-super", n3,
         {1.1808e-06, 2.8391e-07, 9.3771e-08, 3.7885e-08},
         {4.9545, 4.9646, 4.9708}},
        {"FVE-4-3", "bvp-dqr", "h1x-super", n3,
         {4.2542e-06, 1.0062e-06, 3.2908e-07, 1.3210e-07},
         {5.0116, 5.0085, 5.0063}},
        {"FVE-4-4", "bvp-dqr", "l2-super", n3,
         {1.2039e-08, 2.1846e-09, 5.7937e-10, 1.9586e-10},
         {5.9328, 5.9479, 5.9485}},
    };
    return t;
  }();
  return table;
}

}  // namespace fve
