#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgres/dispatch/dispatch.hpp"
#include "mgres/grid/network.hpp"
#include "mgres/sim/controller.hpp"

namespace mgres::sim {

enum class EventKind { DgTrip, DgRestore, LoadMaskStart, LoadMaskEnd, PvLoss, PvRestore };
const char* to_string(EventKind k);
EventKind event_kind_from(const std::string& s);  // throws InputError

struct Event {
    double minute = 0.0;
    EventKind kind = EventKind::DgTrip;
    std::string target;
    // W. dg_trip without a magnitude takes the unit fully offline; pv_loss
    // without one drops the whole scheduled output. Load masks need one.
    std::optional<double> magnitude;
};

struct EventTimeline {
    std::vector<Event> events;
};

// A start event matched with its end.
struct EventWindow {
    enum Target { Dg, Pv, Load } target;
    int entity = 0;
    double start = 0.0, end = 0.0;  // minutes, active on [start, end)
    std::optional<double> magnitude;
};

// Checks ordering, targets and start/end pairing. Throws InputError.
std::vector<EventWindow> event_windows(const grid::NetworkModel& m, const EventTimeline& tl);

// Disturbance for absolute step k. A window is active when it covers the step's start minute.
StepDisturbance disturbance_at(const grid::NetworkModel& m, const dispatch::DispatchResult& sched,
                               const std::vector<EventWindow>& windows, int k);

}  // namespace mgres::sim
