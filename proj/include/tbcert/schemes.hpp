// schemes.hpp
// Constructors for the walk programs of the certification schemes: the
// compound pairwise-interference settings, the single-setting full
// interference walk, the adjacent-pair phase-estimation walk, the N=4
// comprehensive walk, and the multi-pair (four-photon) settings.

#pragma once

#include <map>
#include <vector>

#include "tbcert/walk.hpp"

namespace tbcert {

// One two-bin interference event: bins (early, late) meet at `round`; the
// final splitter's arms end at ports (late, S) and (late+1, L).
struct PairInterference {
    int bin_early = 0;
    int bin_late = 0;
    int round = 0;
    PhotonMode port_short;
    PhotonMode port_long;
};

struct CompoundSetting {
    WalkProgram program;
    std::vector<PairInterference> pairs;  // a perfect matching over bins
};

// N-1 settings for even N (N for odd N) jointly covering all bin pairs
// exactly once, via the round-robin circle method.
std::vector<CompoundSetting> compound_settings(int n_bins);

// Provenance of an output mode: amp = weight * phase per input bin.
struct TraceEntry {
    int input_bin = 0;
    cxd phase{1.0, 0.0};
    double weight = 0.0;
};
using TraceMap = std::map<int, std::vector<TraceEntry>>;  // key: mode index

// Trace map of a program (from the composed single-photon unitary).
TraceMap trace_map(const WalkProgram& program, double amp_tol = 1e-12);

struct SingleSetting {
    WalkProgram program;
    std::vector<PhotonMode> output_ports;  // N ports: S window then L window
    TraceMap trace;
};

// Full-interference walk for N = 2^n: depth 2(N-1), outputs in the windows
// (bin N..3N/2-1, S) and (bin 3N/2..2N-1, L), every port carrying weight
// 1/sqrt(N) from every input bin.
SingleSetting single_setting(int n_bins);

struct PhaseEstimationScheme {
    WalkProgram program;
    std::vector<PairInterference> adjacent_pairs;  // (i, i+1), i = 1..N-1
    // Raw port-probability differences are 1/delta_scale of the two-bin
    // values; estimators multiply by this to recover them.
    double delta_scale = 4.0;
};

// Depth-2 walk interfering all adjacent bin pairs simultaneously.
PhaseEstimationScheme phase_estimation_program(int n_bins);

struct ComprehensiveScheme {
    WalkProgram program;
    TraceMap trace;
    std::vector<PhotonMode> branch_ports;  // all populated output modes
};

// Single walk realizing all six two-bin interferences for N = 4.
ComprehensiveScheme comprehensive_program(int n_bins);

struct MultiSpdcSetting {
    WalkProgram program;
    std::vector<PairInterference> pairs;  // the two pair loci
    PhotonMode merge_port_short;          // arms of the final splitter
    PhotonMode merge_port_long;
};

// The three compound settings extended by one final balanced splitter that
// merges the two pair outputs (four-bin interference).  N = 4 only.
std::vector<MultiSpdcSetting> multi_spdc_settings(int n_bins);

// Human-readable bin-by-round trajectory diagram of a program.
std::string scheme_diagram(const WalkProgram& program);

}  // namespace tbcert
