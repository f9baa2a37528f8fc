#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorr/channels.hpp"
#include "qcorr/qmath.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

/// Gate vocabulary for the tomography experiment: single-qubit X, H, Sdg,
/// parameterized Ry, plus CNOT and controlled-Ry.
struct Gate {
    enum class Kind { X, H, Sdg, Ry, Cnot, CRy };

    Kind kind = Kind::X;
    int target = 0;
    int control = -1;     // Cnot / CRy only
    double theta = 0.0;   // Ry / CRy only

    static Gate x(int target) { return Gate{Kind::X, target, -1, 0.0}; }
    static Gate h(int target) { return Gate{Kind::H, target, -1, 0.0}; }
    static Gate sdg(int target) { return Gate{Kind::Sdg, target, -1, 0.0}; }
    static Gate ry(int target, double theta) { return Gate{Kind::Ry, target, -1, theta}; }
    static Gate cnot(int control, int target) { return Gate{Kind::Cnot, target, control, 0.0}; }
    static Gate cry(int control, int target, double theta) {
        return Gate{Kind::CRy, target, control, theta};
    }
};

inline std::string gate_name(Gate::Kind kind) {
    switch (kind) {
        case Gate::Kind::X: return "x";
        case Gate::Kind::H: return "h";
        case Gate::Kind::Sdg: return "sdg";
        case Gate::Kind::Ry: return "ry";
        case Gate::Kind::Cnot: return "cnot";
        case Gate::Kind::CRy: return "cry";
    }
    throw std::logic_error("gate_name: unreachable");
}

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
};

namespace detail {

inline Mat single_qubit_matrix(const Gate& g) {
    Mat m(2, 2);
    const double c = std::cos(g.theta / 2.0);
    const double s = std::sin(g.theta / 2.0);
    switch (g.kind) {
        case Gate::Kind::X:
            m << 0, 1, 1, 0;
            return m;
        case Gate::Kind::H:
            m << 1, 1, 1, -1;
            return m / std::sqrt(2.0);
        case Gate::Kind::Sdg:
            m << 1, 0, 0, cplx(0, -1);
            return m;
        case Gate::Kind::Ry:
        case Gate::Kind::CRy:
            m << c, -s, s, c;
            return m;
        case Gate::Kind::Cnot:
            m << 0, 1, 1, 0;
            return m;
    }
    throw std::logic_error("single_qubit_matrix: unreachable");
}

} // namespace detail

inline void check_qubit_index(int q, int n, const char* where) {
    if (q < 0 || q >= n) throw std::invalid_argument(std::string(where) + ": qubit index out of range");
}

/// Runs the circuit on |0...0> (or the supplied start vector).
inline PureState simulate(const Circuit& circuit) {
    if (circuit.n_qubits < 1 || circuit.n_qubits > 12)
        throw std::invalid_argument("simulate: qubit count out of range");
    Vec amp = Vec::Zero(1LL << circuit.n_qubits);
    amp(0) = 1.0;
    for (const Gate& g : circuit.gates) {
        check_qubit_index(g.target, circuit.n_qubits, "simulate");
        const Mat u = detail::single_qubit_matrix(g);
        if (g.kind == Gate::Kind::Cnot || g.kind == Gate::Kind::CRy) {
            check_qubit_index(g.control, circuit.n_qubits, "simulate");
            if (g.control == g.target)
                throw std::invalid_argument("simulate: control equals target");
            apply_controlled_gate(amp, circuit.n_qubits, g.control, g.target, u);
        } else {
            apply_single_qubit_gate(amp, circuit.n_qubits, g.target, u);
        }
    }
    return PureState::normalized(circuit.n_qubits, amp);
}

/// Initial two-qubit resource prepared by the circuit front half.
enum class CircuitInitial { Phi0, PhiPi2 };

inline double damping_theta(double p) {
    check_probability(p, "damping_theta");
    return 2.0 * std::asin(std::sqrt(p));
}

inline double damping_probability(double theta) {
    const double s = std::sin(theta / 2.0);
    return s * s;
}

/// Four-qubit circuit: qubits 0,1 carry the pair, qubits 2,3 are their
/// environments. Bell preparation, then per-qubit CRy + CNOT blocks that
/// realize amplitude damping of strength p = sin^2(theta/2) on each carrier.
inline Circuit build_ad_circuit(CircuitInitial initial, double theta) {
    Circuit c;
    c.n_qubits = 4;
    if (initial == CircuitInitial::PhiPi2) c.gates.push_back(Gate::x(1));
    c.gates.push_back(Gate::h(0));
    c.gates.push_back(Gate::cnot(0, 1));
    for (int q = 0; q < 2; ++q) {
        c.gates.push_back(Gate::cry(q, q + 2, theta));
        c.gates.push_back(Gate::cnot(q + 2, q));
    }
    return c;
}

inline std::string circuit_initial_name(CircuitInitial initial) {
    return initial == CircuitInitial::Phi0 ? "phi0" : "phi_pi2";
}

inline CircuitInitial parse_circuit_initial(const std::string& name) {
    if (name == "phi0") return CircuitInitial::Phi0;
    if (name == "phi_pi2") return CircuitInitial::PhiPi2;
    throw std::invalid_argument("parse_circuit_initial: unknown initial '" + name + "'");
}

} // namespace qcorr
