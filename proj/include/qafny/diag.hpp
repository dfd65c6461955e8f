#pragma once

#include <stdexcept>
#include <string>

namespace qafny {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// Error categories map onto CLI exit codes: Parse=1, Kind/Type=2, Runtime=3,
// CheckFail=4.
enum class ErrCat { Parse, Kind, Type, Runtime, CheckFail };

struct Error : std::runtime_error {
  ErrCat cat;
  std::string raw;  // message without the position suffix
  int line;
  int col;

  Error(ErrCat cat, const std::string& msg, int line = 0, int col = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) +
                                          ", col " + std::to_string(col) + ")"
                                    : msg),
        cat(cat),
        raw(msg),
        line(line),
        col(col) {}
};

inline int exit_code(ErrCat cat) {
  switch (cat) {
    case ErrCat::Parse: return 1;
    case ErrCat::Kind:
    case ErrCat::Type: return 2;
    case ErrCat::Runtime: return 3;
    case ErrCat::CheckFail: return 4;
  }
  return 3;
}

}  // namespace qafny
