#include "fpguard/sandbox.hpp"

#include <map>
#include <sstream>
#include <unordered_map>

namespace fpguard {

BehaviorSet ExecutionTrace::kinds() const {
    BehaviorSet s;
    for (const auto& e : events) s.insert(e.kind);
    return s;
}

ExecutionTrace execute(const Program& p, std::uint64_t budget) {
    ExecutionTrace trace;
    if (budget == 0) budget = 1;

    std::unordered_map<std::string, std::size_t> labels;
    for (std::size_t i = 0; i < p.code.size(); ++i) {
        if (p.code[i].op == Opcode::Label) labels.emplace(p.code[i].text, i);
    }
    std::map<std::string, std::int64_t> registers;

    std::size_t pc = 0;
    std::uint64_t step = 0;
    while (pc < p.code.size()) {
        if (step == budget) {
            trace.terminated = Termination::BudgetExhausted;
            break;
        }
        const auto& ins = p.code[pc];
        std::size_t next = pc + 1;
        switch (ins.op) {
        case Opcode::Set: registers[ins.text] = ins.number; break;
        case Opcode::Jmp: next = labels.at(ins.text); break;
        case Opcode::Label:
        case Opcode::Nop: break;
        case Opcode::Open:
        case Opcode::MoveSys: trace.events.push_back({step, *behavior_of(ins.op), ins.text}); break;
        case Opcode::NetSend: trace.events.push_back({step, BehaviorKind::NetSend, ins.number}); break;
        default: trace.events.push_back({step, *behavior_of(ins.op), std::monostate{}}); break;
        }
        ++step;
        pc = next;
    }
    trace.steps_executed = step;
    return trace;
}

BehaviorSet diff_abilities(const Program& p, const ExecutionTrace& t) { return t.kinds() - p.abilities.declared; }

FeatureSet extract_dynamic_features(const Program& p, const ExecutionTrace& t) {
    FeatureSet f;
    auto kinds = t.kinds();
    if (kinds.contains(BehaviorKind::Format)) f.insert(Feature::DynFormat);
    if (kinds.contains(BehaviorKind::MoveSys)) f.insert(Feature::DynMoveSys);
    if (kinds.contains(BehaviorKind::SelfCopy)) f.insert(Feature::DynSelfCopy);
    if (kinds.contains(BehaviorKind::NetSend)) f.insert(Feature::DynNetSend);
    if (t.terminated == Termination::BudgetExhausted) f.insert(Feature::LoopsLong);
    if (!(kinds - p.abilities.declared).empty()) f.insert(Feature::AbilityViolation);
    return f;
}

std::string format_trace(const ExecutionTrace& t) {
    std::ostringstream out;
    for (const auto& e : t.events) {
        out << e.step << '\t' << behavior_name(e.kind) << '\t';
        if (auto s = std::get_if<std::string>(&e.arg)) out << *s;
        else if (auto n = std::get_if<std::int64_t>(&e.arg)) out << *n;
        out << '\n';
    }
    return out.str();
}

}  // namespace fpguard
