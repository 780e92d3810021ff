#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mgres::grid {

enum class Phase : std::uint8_t { A = 0, B = 1, C = 2 };

class PhaseSet {
public:
    PhaseSet() = default;
    explicit PhaseSet(std::uint8_t mask) : mask_(mask & 7u) {}
    static PhaseSet abc() { return PhaseSet(7); }
    static PhaseSet parse(const std::string& s);  // "abc", "a", "BC", ...

    bool has(int p) const { return (mask_ >> p) & 1u; }
    bool empty() const { return mask_ == 0; }
    int count() const { return has(0) + has(1) + has(2); }
    std::vector<int> list() const;
    bool subset_of(PhaseSet o) const { return (mask_ & ~o.mask_) == 0; }
    std::uint8_t mask() const { return mask_; }
    std::string str() const;
    bool operator==(const PhaseSet&) const = default;

private:
    std::uint8_t mask_ = 0;
};

struct Bus {
    std::string id;
    PhaseSet phases;
    double v_min = 0.95;  // pu
    double v_max = 1.05;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct Branch {
    std::string id;
    std::string from;
    std::string to;
    PhaseSet phases;
    Matrix3 r_ohm{};  // indexed by phase; entries of absent phases are ignored
    Matrix3 x_ohm{};
    double flow_limit_va = 0.0;  // per phase
};

// Device capacities are totals over the device's phases; each phase gets an
// equal share.
struct PvUnit {
    std::string id;
    std::string bus;
    PhaseSet phases;
    double capacity_va = 0.0;
    std::vector<double> forecast_w;  // one per step
};

struct DgUnit {
    std::string id;
    std::string bus;
    PhaseSet phases;
    double capacity_va = 0.0;
};

struct StorageUnit {
    std::string id;
    std::string bus;
    PhaseSet phases;
    double power_w = 0.0;
    double energy_min_wh = 0.0;
    double energy_max_wh = 0.0;
    double capacity_va = 0.0;
    double initial_wh = 0.0;
};

struct LoadPoint {
    std::string id;
    std::string bus;
    PhaseSet phases;
    double power_factor = 1.0;  // lagging; Q = P * tan(acos(pf))
    std::vector<double> p_des_w;
    std::vector<double> p_min_w;

    double q_ratio() const;
};

struct Base {
    double kv_ll = 4.16;
    double mva = 1.0;

    double s_va() const { return mva * 1e6; }
    double v_ln() const;
    double z_ohm() const { return v_ln() * v_ln() / s_va(); }
};

struct NetworkModel {
    std::string name;
    Base base;
    int steps = 1;
    double dt_minutes = 60.0;
    double start_minute = 0.0;
    std::string root;  // reference bus; defaults to the first bus
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<PvUnit> pv;
    std::vector<DgUnit> dg;
    std::vector<StorageUnit> storage;
    std::vector<LoadPoint> loads;

    double dt_hours() const { return dt_minutes / 60.0; }
    double step_minute(int k) const { return start_minute + k * dt_minutes; }
    const std::string& root_id() const;

    int bus_index(const std::string& id) const;  // -1 if absent
    int pv_index(const std::string& id) const;
    int dg_index(const std::string& id) const;
    int storage_index(const std::string& id) const;
    int load_index(const std::string& id) const;
};

// Radial orientation rooted at the reference bus. Built from a valid model.
struct Topology {
    int root = 0;
    std::vector<int> parent_branch;  // per bus, -1 for the root
    std::vector<int> branch_from;    // oriented parent bus of each branch
    std::vector<int> branch_to;      // oriented child bus of each branch
    std::vector<std::vector<int>> child_branches;  // per bus
    std::vector<int> order;          // buses in breadth-first order from the root
};

Topology build_topology(const NetworkModel& model);

// Per-phase effective impedance in pu on the model base, phase-rotated:
// z_p = sum_q conj(a_p) Z_pq a_q / Z_base with a = (1, e^{-j2pi/3}, e^{j2pi/3}).
struct EffectiveImpedance {
    std::array<double, 3> r{};
    std::array<double, 3> x{};
};
EffectiveImpedance effective_impedance(const Branch& br, const Base& base);

}  // namespace mgres::grid
