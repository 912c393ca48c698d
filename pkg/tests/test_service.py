import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import random_params
from draftlab.model import Roster, win_probability
from draftlab.queries import DraftState, recommend_pick, recommend_with_familiarity
from draftlab.service import create_app


@pytest.fixture(scope="module")
def params():
    return random_params(20, 4, seed=42)


@pytest.fixture(scope="module")
def client(params):
    return TestClient(create_app(params))


def names(params, indices):
    return [params.registry.name_of(i) for i in indices]


class TestAvatars:
    def test_registry_in_index_order(self, client, params):
        body = client.get("/v1/avatars").json()
        assert len(body) == 20
        assert [e["index"] for e in body] == list(range(20))
        assert [e["name"] for e in body] == list(params.registry.names)


class TestPredict:
    def test_swap_complements_probability(self, client, params):
        red = names(params, [0, 1, 2, 3, 4])
        blue = names(params, [5, 6, 7, 8, 9])
        p = client.post("/v1/predict", json={"red": red, "blue": blue}).json()["p_red_win"]
        q = client.post("/v1/predict", json={"red": blue, "blue": red}).json()["p_red_win"]
        assert p + q == pytest.approx(1.0, abs=1e-12)

    def test_matches_in_process_value_exactly(self, client, params):
        red_idx, blue_idx = [0, 3, 7, 11, 19], [2, 5, 8, 13, 17]
        body = {"red": names(params, red_idx), "blue": names(params, blue_idx)}
        got = client.post("/v1/predict", json=body).json()["p_red_win"]
        expected = win_probability(params, Roster(red_idx), Roster(blue_idx))
        assert got == expected

    def test_partial_rosters_accepted(self, client, params):
        body = {"red": names(params, [0]), "blue": names(params, [1, 2])}
        resp = client.post("/v1/predict", json=body)
        assert resp.status_code == 200
        assert 0.0 < resp.json()["p_red_win"] < 1.0

    def test_unknown_name_is_400_with_offender(self, client, params):
        body = {"red": ["who-is-this"] + names(params, [1, 2, 3, 4]),
                "blue": names(params, [5, 6, 7, 8, 9])}
        resp = client.post("/v1/predict", json=body)
        assert resp.status_code == 400
        payload = resp.json()
        assert payload["code"] == "unknown_avatar"
        assert "who-is-this" in payload["message"]

    def test_overlap_is_400(self, client, params):
        body = {"red": names(params, [0, 1, 2, 3, 4]),
                "blue": names(params, [4, 5, 6, 7, 8])}
        resp = client.post("/v1/predict", json=body)
        assert resp.status_code == 400
        assert resp.json()["code"] == "roster_overlap"

    def test_oversized_roster_is_400(self, client, params):
        body = {"red": names(params, [0, 1, 2, 3, 4, 5]),
                "blue": names(params, [6, 7, 8, 9, 10])}
        resp = client.post("/v1/predict", json=body)
        assert resp.status_code == 400
        assert resp.json()["code"] == "bad_request"


class TestRecommend:
    def test_response_order_matches_in_process(self, client, params):
        ally, enemy = [0, 5, 9, 13], [1, 2, 6, 17, 19]
        body = {"ally": names(params, ally), "enemy": names(params, enemy), "top_k": 11}
        resp = client.post("/v1/recommend", json=body).json()
        expected = recommend_pick(params, DraftState(ally=tuple(ally), enemy=tuple(enemy)),
                                  top_k=11)
        assert [r["avatar"] for r in resp["recommendations"]] == \
            [params.registry.name_of(r.avatar) for r in expected]
        for got, want in zip(resp["recommendations"], expected):
            assert got["win_probability"] == want.win_probability
            assert got["bias_delta"] == want.bias_delta
            assert got["synergy_delta"] == want.synergy_delta
            assert got["opposition_delta"] == want.opposition_delta
        assert resp["familiar_best"] is None

    def test_omitting_pool_uses_all_unpicked(self, client, params):
        ally, enemy = [0], [1]
        body = {"ally": names(params, ally), "enemy": names(params, enemy), "top_k": 50}
        resp = client.post("/v1/recommend", json=body).json()
        got = {r["avatar"] for r in resp["recommendations"]}
        assert got == set(params.registry.names) - set(names(params, ally + enemy))

    def test_familiarity_fields(self, client, params):
        familiar = names(params, [3, 4, 8])
        body = {"ally": names(params, [0]), "enemy": names(params, [1]),
                "familiar": familiar, "top_k": 4, "sim_k": 2}
        resp = client.post("/v1/recommend", json=body).json()
        expected = recommend_with_familiarity(
            params, DraftState(ally=(0,), enemy=(1,), familiar={3, 4, 8}),
            top_k=4, sim_k=2)
        for got, want in zip(resp["recommendations"], expected.picks):
            assert [e["avatar"] for e in got["similar_familiar"]] == \
                [params.registry.name_of(f) for f, _ in want.similar_familiar]
            assert [e["score"] for e in got["similar_familiar"]] == \
                [s for _, s in want.similar_familiar]
        assert resp["familiar_best"]["avatar"] == \
            params.registry.name_of(expected.familiar_best.avatar)

    def test_pool_candidate_already_picked_is_400(self, client, params):
        body = {"ally": names(params, [0]), "enemy": names(params, [1]),
                "pool": names(params, [0, 5])}
        resp = client.post("/v1/recommend", json=body)
        assert resp.status_code == 400
        assert resp.json()["code"] == "invalid_draft"


class TestSimilarAndPair:
    def test_similar_excludes_query(self, client, params):
        name = params.registry.name_of(6)
        resp = client.get("/v1/similar", params={"avatar": name, "top_k": 19}).json()
        assert len(resp) == 19
        assert all(r["avatar"] != name for r in resp)

    def test_similar_values_match_in_process(self, client, params):
        from draftlab.queries import similar_avatars
        name = params.registry.name_of(2)
        resp = client.get("/v1/similar", params={"avatar": name, "top_k": 5}).json()
        expected = similar_avatars(params, 2, top_k=5)
        assert [r["avatar"] for r in resp] == \
            [params.registry.name_of(i) for i, _ in expected]
        assert [r["score"] for r in resp] == [s for _, s in expected]

    def test_pair_symmetric(self, client, params):
        a, b = params.registry.name_of(3), params.registry.name_of(11)
        ab = client.get("/v1/pair", params={"a": a, "b": b}).json()
        ba = client.get("/v1/pair", params={"a": b, "b": a}).json()
        assert ab["synergy"] == pytest.approx(ba["synergy"], abs=1e-12)
        assert ab["opposition"] == pytest.approx(ba["opposition"], abs=1e-12)
        assert ab["cosine"] == pytest.approx(ba["cosine"], abs=1e-12)

    def test_pair_values_match_in_process(self, client, params):
        from draftlab.queries import explain_pair
        a, b = params.registry.name_of(4), params.registry.name_of(9)
        resp = client.get("/v1/pair", params={"a": a, "b": b}).json()
        expected = explain_pair(params, 4, 9)
        assert resp["synergy"] == expected.synergy
        assert resp["opposition"] == expected.opposition
        assert resp["cosine"] == expected.cosine

    def test_self_pair_is_400(self, client, params):
        name = params.registry.name_of(0)
        resp = client.get("/v1/pair", params={"a": name, "b": name})
        assert resp.status_code == 400
        assert resp.json()["code"] == "self_pair"

    def test_unknown_name_is_400(self, client):
        resp = client.get("/v1/similar", params={"avatar": "ghost", "top_k": 3})
        assert resp.status_code == 400
        assert resp.json()["code"] == "unknown_avatar"


class TestStatelessness:
    def test_identical_requests_identical_responses(self, client, params):
        body = {"red": names(params, [0, 1, 2, 3, 4]),
                "blue": names(params, [5, 6, 7, 8, 9])}
        first = client.post("/v1/predict", json=body).content
        for _ in range(3):
            assert client.post("/v1/predict", json=body).content == first
