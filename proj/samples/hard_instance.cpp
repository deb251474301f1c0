// Query counts of Active Cover and IWAL0 on the hard instance as the stream
// grows. Active Cover's count should grow roughly like sqrt(n), IWAL0's
// roughly linearly.
//
//   hard_instance [epsilon] [class_size] [seed]

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "aal/ac.hpp"
#include "aal/backends.hpp"
#include "aal/iwal.hpp"
#include "aal/synth.hpp"

int main(int argc, char** argv) {
  using namespace aal;
  const double epsilon = argc > 1 ? std::stod(argv[1]) : 0.01;
  const std::size_t classes = argc > 2 ? std::stoul(argv[2]) : 1000;
  const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 1;

  std::printf("%8s %10s %10s\n", "n", "ac", "iwal0");
  for (std::size_t n : {2500, 5000, 10000, 20000, 40000}) {
    HardInstanceSpec spec{epsilon, classes, 0, seed};
    auto s = gen_hard(spec, n);
    auto points = std::make_shared<std::vector<HardPoint>>();
    for (const auto& e : s.examples) points->push_back(e.features());

    AcParams ap;
    ap.horizon = n;
    ap.pmin_normalizer = 1.0;
    ActiveCover<EnumeratedBatch<HardPoint>> ac(EnumeratedBatch<HardPoint>(s.hypothesis_class), ap,
                                               [points](std::size_t next, std::size_t u) {
                                                 std::vector<HardPoint> out;
                                                 for (std::size_t i = next; i < points->size() && out.size() < u; ++i)
                                                   out.push_back((*points)[i]);
                                                 return out;
                                               });
    Iwal<EnumeratedLearner<HardPoint>> iwal(EnumeratedLearner<HardPoint>(s.hypothesis_class), IwalVariant::zero, 0.1);

    Rng r1(hash_combine(seed, 1)), r2(hash_combine(seed, 2));
    for (const auto& e : s.examples) {
      step(ac, e, r1);
      step(iwal, e, r2);
    }
    std::printf("%8zu %10zu %10zu\n", n, ac.queries_made(), iwal.queries_made());
  }
}
