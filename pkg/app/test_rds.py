import numpy as np
import pytest

from app.errors import DomainError
from app.graph import Graph, connected_components
from app.netgen import assign_trait, build_configuration_model, build_two_component
from app.rds import RdsSample, check_sample, run_rds, seed_fraction
from app.schemas import PowerLawCutoff, RdsConfig, TraitConfig


def _graph(n, pairs):
    u, v = zip(*pairs)
    return Graph.from_pairs(n, np.array(u, dtype=np.int64), np.array(v, dtype=np.int64))


def _path(n):
    return _graph(n, [(i, i + 1) for i in range(n - 1)])


def _sample_of(n_seeds, size):
    records = [{"id": str(i), "degree": 2, "y": 0, "is_seed": True, "recruiter": None, "wave": 0} for i in range(n_seeds)]
    records += [
        {"id": str(i), "degree": 2, "y": 1, "is_seed": False, "recruiter": "0", "wave": 1} for i in range(n_seeds, size)
    ]
    return RdsSample.from_records(records)


def test_star_from_hub_recruits_three_leaves():
    star = _graph(6, [(0, k) for k in range(1, 6)])
    cfg = RdsConfig(num_seeds=1, coupons=3, target_size=6)
    s = run_rds(star, np.zeros(6, dtype=np.int64), cfg, np.random.default_rng(0), seeds=[0])
    assert len(s) == 4
    assert s.ids[0] == "0"
    assert s.recruiter[1:] == ("0", "0", "0")
    assert s.wave.tolist() == [0, 1, 1, 1]
    assert len(set(s.ids[1:]) - {"1", "2", "3", "4", "5"}) == 0


def test_isolated_seed_gives_single_record():
    g = _graph(4, [(1, 2), (2, 3)])
    s = run_rds(g, np.zeros(4, dtype=np.int64), RdsConfig(num_seeds=1), np.random.default_rng(0), seeds=[0])
    assert len(s) == 1
    assert s.is_seed.tolist() == [True]


def test_replenish_adds_fresh_seed_when_recruitment_dies():
    g = _graph(4, [(1, 2), (2, 3)])
    cfg = RdsConfig(num_seeds=1, target_size=4, replenish_seeds=True)
    s = run_rds(g, np.zeros(4, dtype=np.int64), cfg, np.random.default_rng(0), seeds=[0])
    assert len(s) == 4
    assert s.num_seeds >= 2
    assert check_sample(s, target_size=4) == []


def test_path_from_one_end_is_one_per_wave():
    g = _path(400)
    cfg = RdsConfig(num_seeds=1, coupons=3, target_size=300)
    s = run_rds(g, np.zeros(400, dtype=np.int64), cfg, np.random.default_rng(1), seeds=[0])
    assert list(s.ids) == [str(i) for i in range(300)]
    assert s.wave.tolist() == list(range(300))


def test_seeds_must_fit_population():
    with pytest.raises(DomainError):
        run_rds(_path(3), np.zeros(3, dtype=np.int64), RdsConfig(num_seeds=5), np.random.default_rng(0))
    with pytest.raises(ValueError):
        RdsConfig(num_seeds=10, target_size=5)


def _seed_of_each_record(s):
    origin = {}
    for rid, rec in zip(s.ids, s.recruiter):
        origin[rid] = rid if rec is None else origin[rec]
    return origin


def test_simulated_samples_satisfy_invariants():
    rng = np.random.default_rng(2)
    for _ in range(200):
        n = int(rng.integers(30, 300))
        if rng.random() < 0.5:
            g, _ = build_configuration_model(n, PowerLawCutoff(), rng)
        else:
            g, _ = build_two_component(n // 2, n - n // 2, PowerLawCutoff(), rng)
        y = assign_trait(g, TraitConfig(), rng)
        comp = connected_components(g).label

        for _ in range(50):
            target = int(rng.integers(1, 121))
            cfg = RdsConfig(
                num_seeds=int(rng.integers(1, min(20, target) + 1)),
                coupons=int(rng.integers(1, 5)),
                target_size=target,
                replenish_seeds=bool(rng.random() < 0.5),
            )
            s = run_rds(g, y, cfg, rng)
            assert check_sample(s, target_size=cfg.target_size) == []
            if cfg.replenish_seeds:
                assert s.num_seeds >= cfg.num_seeds
                assert len(s) == min(cfg.target_size, g.n)
            else:
                assert s.num_seeds == cfg.num_seeds
            assert s.degrees.tolist() == [g.degree(int(i)) for i in s.ids]
            assert s.y.tolist() == [int(y[int(i)]) for i in s.ids]
            for rid, seed in _seed_of_each_record(s).items():
                assert comp[int(rid)] == comp[int(seed)]


def test_recruiters_within_a_wave_act_in_random_order():
    # seeds 1 and 2 compete for their only neighbour 3
    g = _graph(4, [(1, 3), (2, 3)])
    y = np.zeros(4, dtype=np.int64)
    cfg = RdsConfig(num_seeds=2, target_size=3)
    winners = set()
    for k in range(40):
        s = run_rds(g, y, cfg, np.random.default_rng(k), seeds=[1, 2])
        assert s.ids[:2] == ("1", "2")
        winners.add(s.recruiter[s.ids.index("3")])
    assert winners == {"1", "2"}


def test_same_seed_same_sample():
    g, _ = build_configuration_model(2000, PowerLawCutoff(), np.random.default_rng(3))
    y = np.zeros(g.n, dtype=np.int64)
    a = run_rds(g, y, RdsConfig(num_seeds=10), np.random.default_rng(4))
    b = run_rds(g, y, RdsConfig(num_seeds=10), np.random.default_rng(4))
    assert a.records() == b.records()


def test_recruits_stay_in_seed_component():
    g, _ = build_two_component(1000, 1000, PowerLawCutoff(), np.random.default_rng(5))
    comp = connected_components(g).label
    s = run_rds(g, np.zeros(g.n, dtype=np.int64), RdsConfig(num_seeds=4), np.random.default_rng(6))
    origin = {}
    for rid, rec in zip(s.ids, s.recruiter):
        origin[rid] = rid if rec is None else origin[rec]
        assert comp[int(rid)] == comp[int(origin[rid])]


def test_check_sample_flags_broken_records():
    s = RdsSample.from_records(
        [
            {"id": "a", "degree": 1, "y": 0, "is_seed": True, "recruiter": None, "wave": 0},
            {"id": "b", "degree": 1, "y": 0, "is_seed": False, "recruiter": "c", "wave": 1},
            {"id": "a", "degree": 1, "y": 0, "is_seed": False, "recruiter": "a", "wave": 2},
        ]
    )
    problems = check_sample(s, target_size=2)
    assert "duplicate ids" in problems
    assert any("not listed earlier" in p for p in problems)
    assert any("does not follow" in p for p in problems)
    assert any("exceeds target" in p for p in problems)


def test_seed_fraction():
    assert seed_fraction(_sample_of(10, 300)) == pytest.approx(1 / 30)
    assert seed_fraction(_sample_of(30, 300)) == pytest.approx(0.1)
    assert seed_fraction(_sample_of(4, 4)) == 1.0
    with pytest.raises(DomainError):
        seed_fraction(RdsSample.from_records([]))
