import numpy as np
import pytest

from ecbw.store import IdeaStore, StoreConfig


def seeded_rng(seed):
    return np.random.default_rng(seed)


def build_fresh_store(family_count=12, per_family=3, target=210, participant_base=100):
    """Families founded and grown by distinct participants, no votes yet.

    Family i is authored by participant ``participant_base + i`` so tests
    can log in a participant who owns nothing.
    """
    store = IdeaStore(StoreConfig(target_idea_count=target, family_count=family_count))
    for i in range(1, family_count + 1):
        store.append_initial(f"seed idea {i}", participant_base + i)
    for i in range(1, family_count + 1):
        tip = i
        for g in range(2, per_family + 1):
            tip = store.append_offspring(
                f"idea {i}.{g}", participant_base + i, tip
            ).id
    return store


def random_store(seed, n_ideas=200, family_count=12, vote_sessions=60):
    """Randomized but invariant-respecting store for oracle fuzz tests."""
    rng = seeded_rng(seed)
    store = IdeaStore(
        StoreConfig(target_idea_count=max(n_ideas, 1), family_count=family_count)
    )
    for i in range(family_count):
        store.append_initial(f"root {i + 1}", int(rng.integers(1, 9)))
    while store.n < n_ideas:
        parent = int(rng.integers(1, store.n + 1))
        store.append_offspring(
            f"idea {store.n + 1}", int(rng.integers(1, 9)), parent
        )
    for _ in range(vote_sessions):
        size = int(rng.integers(1, 10))
        presented = list(
            rng.choice(np.arange(1, store.n + 1), size=size, replace=False)
        )
        voted = [int(i) for i in presented if rng.random() < 0.45]
        store.record_presentation_and_votes(
            [int(i) for i in presented], voted, participant_no=int(rng.integers(1, 9))
        )
    store.validate()
    return store


def replay_log(events, before_commit=None):
    """Rebuild a store from raw events through the public API.

    ``before_commit(store, event)`` runs with the store in exactly the state
    a session saw at login (sequential runs commit in login order), which is
    what the elimination / self-exclusion / presentation-law checks need.
    """
    first = events[0]
    assert first["kind"] == "config"
    store = IdeaStore(
        StoreConfig(
            target_idea_count=first["target_idea_count"],
            family_count=first["family_count"],
            correction_a=first["correction_a"],
            correction_b=first["correction_b"],
            correction_c=first["correction_c"],
        )
    )
    for event in events[1:]:
        if event["kind"] == "idea":
            if event["parent"] == 0:
                store.append_initial(
                    event["text"], event["participant"], allow_overflow=True
                )
            else:
                store.append_offspring(
                    event["text"], event["participant"], event["parent"]
                )
        elif event["kind"] == "commit":
            if before_commit is not None:
                before_commit(store, event)
            store.apply_commit(
                event["participant"],
                event["presented"],
                event["voted"],
                [(n["text"], n["parent"]) for n in event["new_ideas"]],
                allow_initial_overflow=True,
            )
        else:
            raise AssertionError(f"unexpected event kind {event['kind']}")
    return store


def eliminated_ids(store):
    return {
        r.id
        for r in store.records
        if r.presentations > 1 and 2 * r.score < r.presentations
    }


@pytest.fixture
def fresh_store():
    return build_fresh_store()
