#include "curvesub/autodiff.hpp"

namespace curvesub::ad {

namespace {
thread_local Tape* g_active = nullptr;
}

Tape* active_tape() { return g_active; }

TapeScope::TapeScope(Tape& t) : prev_(g_active) { g_active = &t; }
TapeScope::~TapeScope() { g_active = prev_; }

}  // namespace curvesub::ad
