#pragma once

#include <cstdint>
#include <vector>

#include "sdcexp/exponent.hpp"
#include "sdcexp/probability.hpp"

namespace sdcexp {

// Deterministic block code for the exhaustive search: a state encoder
// S^n -> M, a channel encoder (K, S^n) -> X^n and a decoder (Y^n, M) -> K.
// Sequences are flat base-|A| indices, most significant symbol first.
struct Code {
    int n = 1;
    int k_size = 1;
    int m_size = 1;
    std::vector<int> state_enc;  // |S|^n entries in [0, m_size)
    std::vector<int> chan_enc;   // k_size * |S|^n entries in [0, |X|^n)
    std::vector<int> decoder;    // |Y|^n * m_size entries in [0, k_size)

    void validate(const Channel& w) const;
};

// Exact average correct-decoding probability of a code.
double pc_exact(const Channel& w, const Dist& p_s, const Code& code);

// Stochastic-encoder variant used by the sufficiency property test: rows
// chan_enc_rows[(k, s^n)] are distributions over X^n.
double pc_exact_stochastic(const Channel& w, const Dist& p_s, int n, int k_size,
                           int m_size, const std::vector<int>& state_enc,
                           const std::vector<std::vector<double>>& chan_enc_rows,
                           const std::vector<int>& decoder);

// Number of deterministic codes for the instance, as a double (guarded
// against overflow).
double code_count(const Channel& w, int n, int k_size, int m_size);

struct GnResult {
    double g_value = 0.0;  // min over codes of -(1/n) ln pc
    double pc_star = 0.0;  // the corresponding maximal pc
    Code best_code;
    double codes_enumerated = 0.0;
};

// Exhaustive minimization of -(1/n) ln P_c over all deterministic codes.
// Refuses instances with more than 1e9 codes.
GnResult g_n_exhaustive(const Channel& w, const Dist& p_s, int n, int k_size,
                        int m_size);

struct TheoremReport {
    RatePoint rate;
    double g_value = 0.0;
    double pc_star = 0.0;
    double f_sup = 0.0;
    TiltParams f_argmax;
    double slack = 0.0;      // g - (f_sup - ln(5)/n)
    double pc_bound = 0.0;   // min(1, 5 exp(-n f_sup))
    bool pass = false;
};

// Checks G^(n) >= F - (1/n) ln 5 and P_c* <= min(1, 5 e^{-n F}) on one
// exhaustively solvable instance.
TheoremReport verify_main_theorem(const Channel& w, const Dist& p_s, int n,
                                  int k_size, int m_size, const SearchSpec& search,
                                  const OptConfig& cfg);

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
};

McResult mc_pc(const Channel& w, const Dist& p_s, const Code& code,
               std::int64_t trials, std::uint64_t seed);

}  // namespace sdcexp
