#pragma once

namespace clevo {

// Worker count used by grid evaluation and ensemble sweeps. Defaults to the
// OpenMP runtime's choice; values < 1 restore that default.
void set_num_threads(int n);
int num_threads();

}  // namespace clevo
