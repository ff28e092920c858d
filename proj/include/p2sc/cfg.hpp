#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "p2sc/ast.hpp"

namespace p2sc {

/// One instruction of a flattened process. Successor fields are indices
/// into FlatProcess::instrs, or -1.
struct FlatInstr {
  const Instr* instr = nullptr;
  int proc = 0;
  int next = -1;  // straight-line successor (non-aci, non-terminated)
  int tnext = -1; // aci: condition true
  int fnext = -1; // aci: condition false
};

struct FlatProcess {
  std::vector<FlatInstr> instrs; // pre-order; instrs[0] is the initial one
  int terminated = -1;           // index of the terminated instruction
};

/// Control-flow view of a program. Owns a copy of the program so that the
/// instruction pointers stay valid.
class FlatProgram {
public:
  explicit FlatProgram(Program p);
  FlatProgram(const FlatProgram&) = delete;
  FlatProgram& operator=(const FlatProgram&) = delete;

  const Program& program() const { return prog_; }
  const std::vector<FlatProcess>& procs() const { return procs_; }
  const FlatInstr& at(int proc, int idx) const { return procs_[proc].instrs[idx]; }

  /// (process, index) of a label, if present.
  std::optional<std::pair<int, int>> find(const std::string& label) const;

  /// Successors as a list: [tnext, fnext] for aci, [next] for straight-line
  /// instructions, empty for terminated.
  std::vector<int> successors(int proc, int idx) const;

private:
  Program prog_;
  std::vector<FlatProcess> procs_;
  std::map<std::string, std::pair<int, int>> labels_;
};

/// The successor relation keyed by label.
struct SuccessorMap {
  std::map<std::string, std::vector<std::string>> next;
  std::map<std::string, std::string> tnext;
  std::map<std::string, std::string> fnext;
};

SuccessorMap successor_map(const Program& p);

} // namespace p2sc
