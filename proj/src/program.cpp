#include "histrio/program.hpp"

namespace histrio::prog {

static Prog make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Prog ret(Expr value) {
  Node n;
  n.kind = Node::Kind::Return;
  n.value = std::move(value);
  return make(std::move(n));
}

Prog ret_unit() { return ret_value(Value::unit()); }

Prog ret_value(Value v) {
  return ret([v](const Env&) { return v; });
}

Prog let(Prog first, std::string var, Prog rest) {
  Node n;
  n.kind = Node::Kind::Bind;
  n.first = std::move(first);
  n.var = std::move(var);
  n.rest = std::move(rest);
  return make(std::move(n));
}

Prog seq(Prog first, Prog rest) { return prog::let(std::move(first), "", std::move(rest)); }

Prog seq(std::vector<Prog> steps) {
  if (steps.empty()) return ret_unit();
  Prog out = steps.back();
  for (auto it = std::next(steps.rbegin()); it != steps.rend(); ++it) out = seq(*it, out);
  return out;
}

Prog act(ActionPtr action, ArgsFn args) {
  Node n;
  n.kind = Node::Kind::Act;
  n.action = std::move(action);
  n.args = std::move(args);
  return make(std::move(n));
}

Prog act(ActionPtr action) { return act(std::move(action), no_args()); }

Prog par(Prog left, Prog right, SplitFn split, JoinCheck check) {
  Node n;
  n.kind = Node::Kind::Par;
  n.first = std::move(left);
  n.rest = std::move(right);
  n.split = std::move(split);
  n.join_check = std::move(check);
  return make(std::move(n));
}

Prog inject(std::set<Label> frame, Prog body) {
  Node n;
  n.kind = Node::Kind::Inject;
  n.frame = std::move(frame);
  n.first = std::move(body);
  return make(std::move(n));
}

Prog hide(PhiPtr phi, ConcurroidPtr inner, Prog body, HideCheck check) {
  Node n;
  n.kind = Node::Kind::Hide;
  n.phi = std::move(phi);
  n.inner = std::move(inner);
  n.first = std::move(body);
  n.hide_check = std::move(check);
  return make(std::move(n));
}

Prog loop(Prog body, std::uint32_t bound) {
  Node n;
  n.kind = Node::Kind::Loop;
  n.first = std::move(body);
  n.bound = bound;
  return make(std::move(n));
}

Prog if_(Cond cond, Prog then, Prog otherwise) {
  Node n;
  n.kind = Node::Kind::If;
  n.cond = std::move(cond);
  n.first = std::move(then);
  n.rest = std::move(otherwise);
  return make(std::move(n));
}

Prog spec(SpecPtr spec, ArgsFn args, Prog body) {
  Node n;
  n.kind = Node::Kind::Spec;
  n.spec = std::move(spec);
  n.args = std::move(args);
  n.first = std::move(body);
  return make(std::move(n));
}

Expr var(std::string name) {
  return [name](const Env& env) {
    auto it = env.find(name);
    if (it == env.end()) throw std::logic_error("unbound program variable " + name);
    return it->second;
  };
}

Expr lit(Value v) {
  return [v](const Env&) { return v; };
}

ArgsFn args(std::vector<Expr> exprs) {
  return [exprs](const Env& env) {
    Args out;
    out.reserve(exprs.size());
    for (const auto& e : exprs) out.push_back(e(env));
    return out;
  };
}

ArgsFn no_args() {
  return [](const Env&) { return Args{}; };
}

SplitFn split_all_left() {
  return [](const PcmMap& self, const Env&) { return std::pair{self, unit_map(self)}; };
}

SplitFn split_all_right() {
  return [](const PcmMap& self, const Env&) { return std::pair{unit_map(self), self}; };
}

}  // namespace histrio::prog
