#pragma once

// Random closed terms, stacks and processes for property tests.

#include <random>
#include <string>
#include <vector>

#include "kamio/syntax.hpp"

namespace kamio::testing {

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    /// A closed term of roughly `size` nodes.
    Term term(std::size_t size) {
        std::vector<Symbol> scope;
        return term(size, scope);
    }

    Stack stack(std::size_t max_entries, std::size_t entry_size) {
        std::vector<Term> entries;
        std::size_t n = below(max_entries + 1);
        for (std::size_t i = 0; i < n; ++i) entries.push_back(term(1 + below(entry_size)));
        return Stack::from(entries);
    }

    /// A closed process of at most `size` term nodes overall.
    Process process(std::size_t size) {
        if (size < 2) return Process(leaf_constant(), Stack());
        std::size_t head = 1 + below(size - 1);
        std::size_t rest = size - head;
        std::vector<Term> entries;
        while (rest > 0 && entries.size() < 4 && chance(0.7)) {
            std::size_t s = 1 + below(rest);
            entries.push_back(term(s));
            rest -= std::min(rest, entries.back().size());
        }
        return Process(term(head), Stack::from(entries));
    }

    std::string bits(std::size_t max_len) {
        std::string s(below(max_len + 1), '0');
        for (char& c : s) c = chance(0.5) ? '1' : '0';
        return s;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    Term leaf_constant() {
        switch (below(6)) {
            case 0: return Term::call_cc();
            case 1: return Term::read();
            case 2: return Term::write0();
            case 3: return Term::write1();
            default: return Term::end();
        }
    }

    Term leaf(const std::vector<Symbol>& scope) {
        if (!scope.empty() && chance(0.7)) return Term::var(scope[below(scope.size())]);
        return leaf_constant();
    }

    Term term(std::size_t size, std::vector<Symbol>& scope) {
        if (size <= 1) return leaf(scope);
        std::uint64_t pick = below(10);
        if (pick < 3 || size == 2) {
            Symbol x = Symbol::intern(std::string(1, static_cast<char>('a' + below(4))));
            scope.push_back(x);
            Term body = term(size - 1, scope);
            scope.pop_back();
            return Term::lam(x, body);
        }
        if (pick < 5 && size >= 4) {
            // explicit β-redex
            std::size_t fun_size = 2 + below(size - 3);
            Symbol x = Symbol::intern(std::string(1, static_cast<char>('a' + below(4))));
            scope.push_back(x);
            Term body = term(fun_size - 1, scope);
            scope.pop_back();
            return Term::app(Term::lam(x, body), term(size - fun_size, scope));
        }
        if (pick == 5 && size >= 3) {
            std::vector<Term> saved;
            std::size_t budget = size - 1;
            while (budget > 0 && saved.size() < 2) {
                std::size_t s = 1 + below(budget);
                saved.push_back(term(s));
                budget -= s;
            }
            return Term::kont(Stack::from(saved));
        }
        std::size_t left = 1 + below(size - 1);
        return Term::app(term(left, scope), term(size - left, scope));
    }

    std::mt19937_64 rng_;
};

}  // namespace kamio::testing
