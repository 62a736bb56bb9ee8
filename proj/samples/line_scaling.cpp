// Solves unicast MMF on delayed line networks of growing length and prints
// how many region vertices the joint iteration needed.

#include <cstdio>

#include "mmflow/mmflow.hpp"

int main() {
  using namespace mmflow;
  std::printf("%-4s %-10s %-8s %-8s %s\n", "L", "objective", "vertices", "graph", "millis");
  for (int L = 2; L <= 10; ++L) {
    const auto inst = line_instance(L, 1, 1);
    SolveOptions options;
    options.exact = true;
    const auto report = joint_solve(inst.network, inst.sessions, ProblemKind::MaxMultiflow, options);
    std::printf("%-4d %-10s %-8zu %-8zu %.3f\n", L, to_string(report.objective).c_str(), report.region.size(),
                report.graph_vertices, report.millis);
  }
}
