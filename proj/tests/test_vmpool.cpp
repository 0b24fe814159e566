#include <catch2/catch_amalgamated.hpp>

#include "offload/clock.hpp"
#include "offload/vmpool.hpp"
#include "offload/workloads.hpp"

using namespace offload;
using namespace offload::vmpool;

TEST_CASE("configuration table holds the fixed rows") {
  const auto& t = vm_config_table();
  REQUIRE(t.size() == 6);
  CHECK(t[0] == VmConfig{"basic", 1, 200, 32, 1.0});
  CHECK(t[1] == VmConfig{"main", 1, 512, 100, 1.0});
  CHECK(t[2] == VmConfig{"large", 1, 1024, 100, 1.0});
  CHECK(t[3].cpus == 2);
  CHECK(t[4].cpus == 4);
  CHECK(t[5].cpus == 8);
  for (std::size_t i = 1; i < t.size(); ++i)
    CHECK(t[i].throughput() >= t[i - 1].throughput());
}

TEST_CASE("escalate walks the table order and errors past the top") {
  CHECK(escalate(*find_config("basic")).name == "main");
  CHECK(escalate(*find_config("main")).name == "large");
  CHECK(escalate(*find_config("large")).name == "x2large");
  CHECK_THROWS_AS(escalate(*find_config("x8large")), NoLargerConfig);
}

TEST_CASE("acquire resumes a paused instance in 300 ms") {
  VirtualClock clock;
  VmPool pool(clock);
  pool.seed_paused(*find_config("main"), 1);
  auto acq = pool.acquire(*find_config("main"), 1);
  CHECK(acq.vm_ids.size() == 1);
  CHECK(acq.overhead_ms == 300.0);
  CHECK(pool.get(acq.vm_ids[0]).state == VmState::Running);
}

TEST_CASE("seven simultaneous resumes land in the 6-7 s band") {
  VirtualClock clock;
  VmPool pool(clock);
  pool.seed_paused(*find_config("large"), 7);
  auto acq = pool.acquire(*find_config("large"), 7);
  REQUIRE(acq.per_vm_overhead_ms.size() == 7);
  double worst = *std::max_element(acq.per_vm_overhead_ms.begin(),
                                   acq.per_vm_overhead_ms.end());
  CHECK(worst >= 6000.0);
  CHECK(worst <= 7000.0);
}

TEST_CASE("cold start costs 32 s") {
  VirtualClock clock;
  VmPool pool(clock);
  auto acq = pool.acquire(*find_config("main"), 1);  // nothing seeded
  CHECK(acq.overhead_ms == 32000.0);
}

TEST_CASE("release pauses; double release is a contract violation") {
  VirtualClock clock;
  VmPool pool(clock);
  pool.seed_paused(*find_config("main"), 1);
  auto acq = pool.acquire(*find_config("main"), 1);
  pool.release(acq.vm_ids);
  CHECK(pool.get(acq.vm_ids[0]).state == VmState::Paused);
  CHECK_THROWS_AS(pool.release(acq.vm_ids), InputError);
}

TEST_CASE("releasing a busy instance is refused") {
  VirtualClock clock;
  VmPool pool(clock);
  pool.seed_paused(*find_config("main"), 1);
  auto acq = pool.acquire(*find_config("main"), 1);
  pool.set_busy(acq.vm_ids[0], true);
  CHECK_THROWS_AS(pool.release(acq.vm_ids), InputError);
  pool.set_busy(acq.vm_ids[0], false);
  pool.release(acq.vm_ids);
}

TEST_CASE("idle paused instances power off on tick") {
  VirtualClock clock;
  PoolPolicy policy;
  policy.pause_after_idle_s = 10;
  VmPool pool(clock, policy);
  pool.seed_paused(*find_config("main"), 1);
  auto acq = pool.acquire(*find_config("main"), 1);
  pool.release(acq.vm_ids);
  clock.advance_ms(9000);
  pool.tick();
  CHECK(pool.get(acq.vm_ids[0]).state == VmState::Paused);
  clock.advance_ms(1500);
  pool.tick();
  CHECK(pool.get(acq.vm_ids[0]).state == VmState::PoweredOff);
}

TEST_CASE("pool limit raises pool-exhausted") {
  VirtualClock clock;
  PoolPolicy policy;
  policy.max_running = 2;
  VmPool pool(clock, policy);
  pool.seed_paused(*find_config("main"), 4);
  CHECK_THROWS_AS(pool.acquire(*find_config("main"), 3), PoolExhausted);
  auto acq = pool.acquire(*find_config("main"), 2);
  CHECK(acq.vm_ids.size() == 2);
}

// Lifecycle property: across random acquire/release/tick sequences only the
// allowed transitions appear (PoweredOff -> Running, Running -> Paused,
// Paused -> Running, Paused -> PoweredOff).
TEST_CASE("state machine only takes legal edges") {
  VirtualClock clock;
  VmPool pool(clock);
  pool.seed_paused(*find_config("main"), 3);
  std::map<int, VmState> last;
  auto check_transitions = [&] {
    for (const auto& vm : pool.snapshot()) {
      auto it = last.find(vm.id);
      if (it != last.end() && it->second != vm.state) {
        VmState from = it->second, to = vm.state;
        bool legal = (from == VmState::PoweredOff && to == VmState::Running) ||
                     (from == VmState::Running && to == VmState::Paused) ||
                     (from == VmState::Paused && to == VmState::Running) ||
                     (from == VmState::Paused && to == VmState::PoweredOff);
        CHECK(legal);
      }
      last[vm.id] = vm.state;
    }
  };
  std::mt19937 rng(2024);
  std::vector<int> held;
  for (int step = 0; step < 200; ++step) {
    switch (rng() % 3) {
      case 0:
        if (held.empty()) {
          auto acq = pool.acquire(*find_config("main"), 1 + rng() % 2);
          held = acq.vm_ids;
        }
        break;
      case 1:
        if (!held.empty()) {
          pool.release(held);
          held.clear();
        }
        break;
      case 2:
        clock.advance_ms(static_cast<double>(rng() % 120000));
        pool.tick();
        break;
    }
    check_transitions();
  }
}

TEST_CASE("split over one instance equals unsplit execution") {
  auto bundle = workloads::make_nqueens();
  VmInstance vm;
  vm.id = 1;
  vm.config = *find_config("main");
  vm.state = VmState::Running;
  auto r = split_and_distribute(bundle, workloads::nqueens_args(6), {vm});
  CHECK(task::decode_u64(r.merged) == 4);
}

TEST_CASE("merged fan-out equals the single-instance result") {
  auto bundle = workloads::make_nqueens();
  for (int k : {1, 2, 4, 8}) {
    std::vector<VmInstance> vms;
    for (int i = 0; i < k; ++i) {
      VmInstance vm;
      vm.id = i + 1;
      vm.config = *find_config("main");
      vm.state = VmState::Running;
      vms.push_back(vm);
    }
    auto r = split_and_distribute(bundle, workloads::nqueens_args(8), vms);
    CHECK(task::decode_u64(r.merged) == 92);
    CHECK(r.parts.size() == static_cast<std::size_t>(k));
  }
}

TEST_CASE("makespan shrinks with fan-out when parts dominate") {
  auto bundle = workloads::make_nqueens();
  auto make_vms = [](int k) {
    std::vector<VmInstance> vms;
    for (int i = 0; i < k; ++i) {
      VmInstance vm;
      vm.id = i + 1;
      vm.config = *find_config("main");
      vm.state = VmState::Running;
      vms.push_back(vm);
    }
    return vms;
  };
  auto input = workloads::nqueens_args(8);
  double m1 = split_and_distribute(bundle, input, make_vms(1)).makespan_ms;
  double m2 = split_and_distribute(bundle, input, make_vms(2)).makespan_ms;
  double m4 = split_and_distribute(bundle, input, make_vms(4)).makespan_ms;
  CHECK(m2 < m1);
  CHECK(m4 < m2);
}

TEST_CASE("a failing part fails the whole call") {
  task::TaskBundle bundle;
  bundle.id = "boom";
  bundle.splittable = true;
  bundle.run = [](const Bytes& in) -> Bytes {
    if (!in.empty() && in[0] == 1) throw std::runtime_error("part failed");
    return in;
  };
  bundle.split = [](const Bytes&, int k) {
    std::vector<Bytes> parts(static_cast<std::size_t>(k));
    parts.back() = Bytes{1};
    return parts;
  };
  bundle.merge = [](const std::vector<Bytes>&) { return Bytes{}; };
  bundle.work_units = [](const Bytes&) { return 1.0; };
  bundle.peak_memory_mb = [](const Bytes&) { return 1.0; };
  bundle.input_size_proxy = [](const Bytes&) { return 1.0; };

  std::vector<VmInstance> vms(3);
  for (int i = 0; i < 3; ++i) {
    vms[i].id = i + 1;
    vms[i].config = *find_config("main");
    vms[i].state = VmState::Running;
  }
  CHECK_THROWS_WITH(split_and_distribute(bundle, Bytes{}, vms), "part failed");
}
