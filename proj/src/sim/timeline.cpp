#include "mgres/sim/timeline.hpp"

#include <cmath>
#include <map>

#include "mgres/util/errors.hpp"

namespace mgres::sim {

namespace {
const char* kNames[] = {"dg_trip", "dg_restore", "load_mask_start", "load_mask_end", "pv_loss", "pv_restore"};
}

const char* to_string(EventKind k) { return kNames[static_cast<int>(k)]; }

EventKind event_kind_from(const std::string& s) {
    for (int i = 0; i < 6; ++i)
        if (s == kNames[i]) return static_cast<EventKind>(i);
    throw InputError("event.kind", "unknown event kind '" + s + "'");
}

std::vector<EventWindow> event_windows(const grid::NetworkModel& m, const EventTimeline& tl) {
    std::vector<EventWindow> out;
    std::map<std::pair<int, int>, std::size_t> open;  // (target class, entity) -> index in out
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tl.events.size(); ++i) {
        const auto& e = tl.events[i];
        const std::string where = "events[" + std::to_string(i) + "]";
        if (!std::isfinite(e.minute)) throw InputError(where, "time must be finite");
        if (e.minute < last) throw InputError(where, "event times must be non-decreasing");
        last = e.minute;
        EventWindow::Target tgt;
        bool start = false;
        switch (e.kind) {
            case EventKind::DgTrip: tgt = EventWindow::Dg, start = true; break;
            case EventKind::DgRestore: tgt = EventWindow::Dg; break;
            case EventKind::PvLoss: tgt = EventWindow::Pv, start = true; break;
            case EventKind::PvRestore: tgt = EventWindow::Pv; break;
            case EventKind::LoadMaskStart: tgt = EventWindow::Load, start = true; break;
            default: tgt = EventWindow::Load; break;
        }
        const int ent = tgt == EventWindow::Dg ? m.dg_index(e.target)
                        : tgt == EventWindow::Pv ? m.pv_index(e.target)
                                                 : m.load_index(e.target);
        if (ent < 0) throw InputError(where, "unknown target '" + e.target + "' for " + to_string(e.kind));
        const auto key = std::make_pair(static_cast<int>(tgt), ent);
        if (start) {
            if (open.count(key)) throw InputError(where, e.target + " already has an open " + to_string(e.kind));
            if (e.magnitude && (!std::isfinite(*e.magnitude) || (tgt != EventWindow::Load && *e.magnitude < 0)))
                throw InputError(where, "bad magnitude");
            if (tgt == EventWindow::Load && !e.magnitude) throw InputError(where, "load_mask_start needs a magnitude");
            open[key] = out.size();
            out.push_back({tgt, ent, e.minute, e.minute, e.magnitude});
        } else {
            auto it = open.find(key);
            if (it == open.end()) throw InputError(where, std::string(to_string(e.kind)) + " without a matching start");
            out[it->second].end = e.minute;
            open.erase(it);
        }
    }
    if (!open.empty()) {
        const auto& w = out[open.begin()->second];
        throw InputError("events", "event starting at minute " + std::to_string(w.start) + " is never closed");
    }
    return out;
}

StepDisturbance disturbance_at(const grid::NetworkModel& m, const dispatch::DispatchResult& sched,
                               const std::vector<EventWindow>& windows, int k) {
    auto d = StepDisturbance::none(m);
    const double t0 = m.step_minute(k);
    const int t = k - sched.first_step;
    for (const auto& w : windows) {
        if (!(w.start <= t0 && t0 < w.end)) continue;
        switch (w.target) {
            case EventWindow::Dg: {
                const double out = sched.dg.at(w.entity).total_p(t);
                d.dg_loss[w.entity] += w.magnitude ? *w.magnitude : out;
                d.dg_cap_loss[w.entity] += w.magnitude ? *w.magnitude : m.dg[w.entity].capacity_va;
                d.dg_impaired[w.entity] = 1;
                break;
            }
            case EventWindow::Pv:
                d.pv_loss[w.entity] += w.magnitude ? *w.magnitude : sched.pv.at(w.entity).total_p(t);
                d.pv_impaired[w.entity] = 1;
                break;
            case EventWindow::Load:
                d.load_delta[w.entity] += *w.magnitude;
                d.load_impaired[w.entity] = 1;
                break;
        }
    }
    return d;
}

}  // namespace mgres::sim
