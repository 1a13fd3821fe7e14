#include "histrio/suites.hpp"

#include "histrio/gen.hpp"
#include "histrio/structures/flat_combiner.hpp"
#include "histrio/structures/pair_snapshot.hpp"
#include "histrio/structures/private_heap.hpp"
#include "histrio/structures/spin_lock.hpp"
#include "histrio/structures/treiber.hpp"

namespace histrio {

namespace {

std::string show(const PcmElement& e) { return e.render(); }
std::string show_map(const PcmMap& m) { return render(m); }

}  // namespace

std::vector<LawReport> run_law_suites(std::uint64_t seed, std::size_t samples) {
  Gen g(seed);
  std::vector<LawReport> out;
  out.push_back(check_pcm_laws(heap_instance(), [&] { return PcmElement(random_heap(g, 3, g.coin())); }, samples, show));
  for (HistKind k : {HistKind::Pair, HistKind::Stack}) {
    auto shape = PcmElement(make_history(k));
    out.push_back(check_pcm_laws(history_instance(k), [&] { return random_element_like(g, shape); }, samples, show));
  }
  out.push_back(check_pcm_laws_exhaustive(mutex_instance(),
                                          std::vector<PcmElement>{PcmElement(Mutex::NotOwn), PcmElement(Mutex::Own)}, show));
  out.push_back(check_pcm_laws(idset_instance(), [&] { return PcmElement(random_idset(g, 6)); }, samples, show));
  PcmElement aux_unit(make_history(HistKind::Stack));
  PcmElement shape(IdSet{}, Mutex::NotOwn, aux_unit);
  out.push_back(check_pcm_laws(triple_instance(aux_unit), [&] { return random_element_like(g, shape); }, samples, show));
  PcmMap units{{labels::pv, PcmElement(Heap{})}, {labels::tb, PcmElement(make_history(HistKind::Stack))}};
  out.push_back(check_pcm_laws(
      map_instance(units),
      [&] {
        PcmMap m;
        for (const auto& [l, u] : units) m[l] = random_element_like(g, u);
        return m;
      },
      samples, show_map));
  return out;
}

std::vector<CheckReport> run_concurroid_suites(std::uint64_t seed, std::size_t samples) {
  Gen g(seed);
  auto s = make_pair_snapshot();
  auto t = make_treiber();
  auto l = make_spin_lock();
  auto f = make_flat_combiner(3);
  std::vector<CheckReport> out;
  for (const auto& c : {private_heap().concurroid, s.concurroid, t.concurroid, l.concurroid, f.concurroid, t.entangled,
                        l.entangled, f.entangled}) {
    auto rs = check_concurroid(*c, g, samples);
    out.insert(out.end(), rs.begin(), rs.end());
  }
  return out;
}

std::vector<ActionReport> run_action_suites(std::uint64_t seed, std::size_t samples) {
  Gen g(seed);
  auto s = make_pair_snapshot();
  auto t = make_treiber();
  auto l = make_spin_lock();
  auto f = make_flat_combiner(3);
  const auto& p = private_heap();
  std::vector<ActionReport> out;
  for (const auto& a : {p.alloc, p.write, p.read, p.dealloc, s.read_x, s.read_y, s.write_x, s.write_y, t.read_sentinel,
                        t.read_node, t.try_pop, t.try_push, l.trylock, l.unlock, f.req_help, f.read_req, f.do_help,
                        f.try_lock, f.unlock, f.try_collect}) {
    out.push_back(check_action_properties(*a, g, samples));
  }
  return out;
}

bool suite_ok(const CheckReport& r) { return r.ok() && (r.check != "guarantee" || r.applicable > 0); }

}  // namespace histrio
