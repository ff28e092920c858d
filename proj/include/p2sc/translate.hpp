#pragma once

// Translation of a program and a context bound K into a program whose SC
// runs simulate the K-bounded POWER runs of the input.

#include <string>
#include <vector>

#include "p2sc/ast.hpp"

namespace p2sc {

/// Names of the auxiliary state added by the translation. Context-indexed
/// arrays have K + 1 slots; slot 0 is unused so contexts stay 1-based.
struct AuxLayout {
  int nprocs = 0;
  int nvars = 0;
  int nregs = 0;
  int k = 0;
  int ntargets = 0;

  std::vector<std::string> procs; // source process names, by index
  std::vector<std::string> vars;  // source variable names, by index
  std::vector<std::string> regs;  // all source registers, by global index

  static constexpr const char* cval = "@cval";         // [P][X][K+1]
  static constexpr const char* initcval = "@initcval"; // [P][X][K+1]
  static constexpr const char* utst = "@utst";         // [P][X][K+1][P]
  static constexpr const char* gtst = "@gtst";         // [P][X][K+1][P]
  static constexpr const char* lval = "@lval";         // [P][X]
  static constexpr const char* iread = "@iread";       // [P][X]
  static constexpr const char* cread = "@cread";       // [P][X]
  static constexpr const char* iwrite = "@iwrite";     // [P][X]
  static constexpr const char* cwrite = "@cwrite";     // [P][X]
  static constexpr const char* ireg = "@ireg";         // [R]
  static constexpr const char* creg = "@creg";         // [R]
  static constexpr const char* ctrl = "@ctrl";         // [P]
  static constexpr const char* active = "@active";     // [K+1]
  static constexpr const char* ccontext = "@ccontext";
  static constexpr const char* reached = "@reached"; // [targets]

  /// Auxiliary cells with timestamps counted as single units:
  /// 4PXK + 5PX + 2R + P + K + 1 + targets.
  long logical_cells() const;
  /// Scalar cells actually declared (timestamps expanded, slot 0 included).
  long emitted_scalars() const;

  int reg_index(const std::string& reg) const;
};

/// Names of the synthetic processes and labels.
inline constexpr const char* kIniProc = "@ini";
inline constexpr const char* kVerProc = "@ver";
inline constexpr const char* kErrorLabel = "@v_error";

struct TranslationStats {
  int source_instrs = 0;
  int output_atomic_stmts = 0; // statements inside atomic blocks, recursively
  int choose_sites = 0;
  int constrain_sites = 0;
};

struct ExtendedProgram {
  Program program;
  AuxLayout layout;
  std::vector<std::string> targets;
  std::string error_label = kErrorLabel;
  TranslationStats stats;
};

/// Throws std::invalid_argument when k < 1, when the program is not valid
/// source, or when a target label does not exist.
ExtendedProgram translate_program(const Program& p, int k,
                                  const std::vector<std::string>& targets, int domain = 4);

/// Upper bound on TranslationStats::output_atomic_stmts for n source
/// instructions: c1 * n + c2 * P * X * K + 2R + P + K + 2, where
/// c1 = 3P^2 + 6P + 2R + 15 (a write block, the largest) and c2 = 4P + 9
/// (the initializing and verifying processes).
long translation_size_bound(int nprocs, int nvars, int nregs, int k, int ninstrs);

} // namespace p2sc
