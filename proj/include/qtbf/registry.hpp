#pragma once

// Named decoders and the plain-text decoder description format.
//
//   name D9
//   kind tbf                      (tbf | bf | nms)
//   factor 0.875                  (nms only)
//   region 0                      (start index, or "boundary")
//   psi 01 01 00 11 01 10 11 11 11 11 10 01 11 00 01 01
//   f 0100011010
//   region boundary
//   ...
//
// psi lists the 16 next states row by row in the order 01, 00, 11, 10 of the
// current state, columns chi1 = 0..3.

#include <array>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtbf/decoders.hpp"

namespace qtbf {

namespace fvectors {

inline const std::array<FVector, 8>& table_ii() {
    static const std::array<FVector, 8> table = {
        FVector::from_string("0100011010"),  // D1
        FVector::from_string("0000000000"),  // D2
        FVector::from_string("0000100000"),  // D3
        FVector::from_string("0000010000"),  // D4
        FVector::from_string("1100000011"),  // D5
        FVector::from_string("0001000001"),  // D6
        FVector::from_string("1100001100"),  // D7
        FVector::from_string("0100010111"),  // D8
    };
    return table;
}

}  // namespace fvectors

/// Two regions split at `boundary`: `first` rules on [0, boundary), `second` on the rest.
inline DecoderSpec split_decoder(std::string name, FVector f, const PsiTable& first, const PsiTable& second,
                                 std::size_t boundary) {
    if (boundary == 0) throw std::invalid_argument("split_decoder: a split decoder needs a nonzero boundary");
    DecoderSpec spec;
    spec.name = std::move(name);
    spec.region_starts = {0, boundary};
    spec.rules = {RegionRule{first, f}, RegionRule{second, f}};
    return spec;
}

/// Names: D1..D10, BF, NMS, and the split variants "Dk/V2" (delayed table on
/// the second block) and "Dk/V1" (delayed table on the first block) for k = 1..8.
inline DecoderSpec named_decoder(const std::string& name, std::size_t boundary) {
    if (name == "BF") {
        DecoderSpec spec;
        spec.name = name;
        spec.kind = DecoderKind::BitFlip;
        return spec;
    }
    if (name == "NMS") {
        DecoderSpec spec;
        spec.name = name;
        spec.kind = DecoderKind::MinSum;
        return spec;
    }
    auto parse_index = [&](const std::string& digits) -> int {
        if (digits.empty() || digits.size() > 2) return -1;
        for (char ch : digits) {
            if (ch < '0' || ch > '9') return -1;
        }
        return std::stoi(digits);
    };
    if (name.size() >= 2 && name[0] == 'D') {
        const auto slash = name.find('/');
        const int k = parse_index(name.substr(1, slash == std::string::npos ? std::string::npos : slash - 1));
        const auto& tii = fvectors::table_ii();
        if (slash == std::string::npos) {
            if (k >= 1 && k <= 8) return DecoderSpec::two_bit(name, tii[static_cast<std::size_t>(k - 1)]);
            if (k == 9) return split_decoder(name, tii[0], tables::base(), tables::delayed(), boundary);
            if (k == 10) return split_decoder(name, tii[0], tables::delayed(), tables::base(), boundary);
        } else if (k >= 1 && k <= 8) {
            const std::string side = name.substr(slash + 1);
            const FVector f = tii[static_cast<std::size_t>(k - 1)];
            if (side == "V2") return split_decoder(name, f, tables::base(), tables::delayed(), boundary);
            if (side == "V1") return split_decoder(name, f, tables::delayed(), tables::base(), boundary);
        }
    }
    throw std::invalid_argument("unknown decoder name: " + name);
}

namespace detail {

inline std::string state_bits(VarState w) {
    const auto x = static_cast<unsigned>(w);
    return std::string{static_cast<char>('0' + ((x >> 1) & 1U)), static_cast<char>('0' + (x & 1U))};
}

inline VarState parse_state(const std::string& tok) {
    if (tok == "00") return VarState::WeakZero;
    if (tok == "01") return VarState::StrongZero;
    if (tok == "10") return VarState::WeakOne;
    if (tok == "11") return VarState::StrongOne;
    throw std::invalid_argument("bad variable state '" + tok + "'");
}

}  // namespace detail

inline std::string psi_to_string(const PsiTable& psi) {
    std::string out;
    for (auto w : PsiTable::kRowOrder) {
        for (unsigned chi = 0; chi < 4; ++chi) {
            if (!out.empty()) out.push_back(' ');
            out += detail::state_bits(psi(w, chi));
        }
    }
    return out;
}

inline PsiTable psi_from_tokens(const std::vector<std::string>& tokens) {
    if (tokens.size() != 16) throw std::invalid_argument("psi: expected 16 entries");
    PsiTable psi;
    for (std::size_t i = 0; i < 16; ++i) {
        psi.set(PsiTable::kRowOrder[i / 4], static_cast<unsigned>(i % 4), detail::parse_state(tokens[i]));
    }
    return psi;
}

inline void write_decoder_spec(std::ostream& out, const DecoderSpec& spec) {
    out << "name " << spec.name << '\n';
    switch (spec.kind) {
        case DecoderKind::BitFlip:
            out << "kind bf\n";
            return;
        case DecoderKind::MinSum:
            out << "kind nms\nfactor " << spec.nms_factor << '\n';
            return;
        case DecoderKind::TwoBit:
            out << "kind tbf\n";
            break;
    }
    for (std::size_t i = 0; i < spec.rules.size(); ++i) {
        out << "region " << spec.region_starts.at(i) << '\n';
        out << "psi " << psi_to_string(spec.rules[i].psi) << '\n';
        out << "f " << spec.rules[i].f.to_string() << '\n';
    }
}

/// Parses one decoder description; "region boundary" resolves to `boundary`.
inline DecoderSpec read_decoder_spec(std::istream& in, std::size_t boundary) {
    DecoderSpec spec;
    spec.region_starts.clear();
    std::string line;
    std::size_t line_no = 0;
    bool have_psi = false, have_f = false;
    auto fail = [&](const std::string& msg) -> void {
        throw std::invalid_argument("decoder spec line " + std::to_string(line_no) + ": " + msg);
    };
    auto close_region = [&] {
        if (spec.region_starts.size() != spec.rules.size()) return;
        if (!spec.rules.empty() && (!have_psi || !have_f)) fail("region needs both psi and f");
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        std::vector<std::string> args;
        for (std::string tok; ls >> tok;) args.push_back(tok);
        try {
            if (key == "name") {
                if (args.size() != 1) fail("name takes one value");
                spec.name = args[0];
            } else if (key == "kind") {
                if (args.size() != 1) fail("kind takes one value");
                if (args[0] == "tbf") spec.kind = DecoderKind::TwoBit;
                else if (args[0] == "bf") spec.kind = DecoderKind::BitFlip;
                else if (args[0] == "nms") spec.kind = DecoderKind::MinSum;
                else fail("unknown kind '" + args[0] + "'");
            } else if (key == "factor") {
                if (args.size() != 1) fail("factor takes one value");
                spec.nms_factor = std::stod(args[0]);
            } else if (key == "region") {
                if (args.size() != 1) fail("region takes one value");
                if (!spec.rules.empty() && (!have_psi || !have_f)) fail("previous region needs both psi and f");
                spec.region_starts.push_back(args[0] == "boundary" ? boundary : std::stoul(args[0]));
                spec.rules.emplace_back();
                have_psi = have_f = false;
            } else if (key == "psi" || key == "f") {
                if (spec.rules.empty()) {
                    spec.region_starts.push_back(0);
                    spec.rules.emplace_back();
                }
                if (key == "psi") {
                    spec.rules.back().psi = psi_from_tokens(args);
                    have_psi = true;
                } else {
                    std::string joined;
                    for (const auto& a : args) joined += a;
                    spec.rules.back().f = FVector::from_string(joined);
                    have_f = true;
                }
            } else {
                fail("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            const std::string what = e.what();
            if (what.rfind("decoder spec line", 0) == 0) throw;
            fail(what);
        } catch (const std::out_of_range&) {
            fail("number out of range");
        }
    }
    close_region();
    if (spec.name.empty()) throw std::invalid_argument("decoder spec: missing name");
    if (spec.kind == DecoderKind::TwoBit) {
        if (spec.rules.empty()) throw std::invalid_argument("decoder spec: tbf decoder needs at least one region");
        if (!have_psi || !have_f) throw std::invalid_argument("decoder spec: last region needs both psi and f");
    } else {
        spec.region_starts = {0};
        spec.rules.clear();
    }
    return spec;
}

inline DecoderSpec parse_decoder_spec(const std::string& text, std::size_t boundary) {
    std::istringstream in(text);
    return read_decoder_spec(in, boundary);
}

}  // namespace qtbf
