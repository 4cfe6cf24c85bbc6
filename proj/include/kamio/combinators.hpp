#pragma once

// Church numerals and the combinator toolkit that turns a numeral-level
// λ-term into a process reading its argument from the input and writing
// the result to the output.

#include <cstdint>
#include <optional>
#include <string_view>

#include "kamio/machine.hpp"
#include "kamio/syntax.hpp"

namespace kamio {

class MalformedOutput : public Error {
public:
    using Error::Error;
};

/// \f. \x. f (... (f x)) with n applications.
Term church(std::uint64_t n);

struct CombinatorSet {
    Term B;  // n ↦ 2n
    Term C;  // n ↦ 2n+1
    Term H;  // n ↦ floor(n/2)
    Term S;  // n ↦ n+1
    Term E;  // parity branch: even ↦ first, odd ↦ second
    Term Z;  // zero test: 0 ↦ first, n+1 ↦ second
    Term Y;  // fixed point
    Term F;  // storage step \h y. h (S y)
    Term Q;
    Term R;  // reader
    Term V;
    Term W;  // writer
};

/// The library combinators, parsed once from prelude_source().
const CombinatorSet& combinators();

/// Concrete-syntax definitions of all library combinators.
std::string_view prelude_source();
/// prelude_source() as name bindings for the parser.
const Definitions& prelude_definitions();

/// Runs (W t * nil, "", "") and reads the terminal output back as a number.
/// nullopt when the run does not terminate cleanly within fuel; throws
/// MalformedOutput when it terminates with a non-canonical output.
std::optional<std::uint64_t> decode_numeral(const Term& t, std::uint64_t fuel = kDefaultRunFuel);

/// F · W · #0 · nil: the stack that writes out the numeral in head position.
Stack writer_tail();

/// church(n) * F · t · #0 · F · W · #0 · nil
Process storage_apply(const Term& t, std::uint64_t n);

/// R * F · t · #0 · F · W · #0 · nil. Throws NotProofLike for effectful t and
/// ClosednessError for open t.
Process compile_function(const Term& t);

/// R * tail
Process reader_process(const Stack& tail);

}  // namespace kamio
