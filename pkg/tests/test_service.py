"""Community service: accounts, chat, likes, favourites, search, wiring."""
from __future__ import annotations

import threading

import pytest

from modulecanvas.chat import UnknownTemplate, UnresolvedSlot
from modulecanvas.config import ServiceConfig
from modulecanvas.h5p import read_package, write_package
from modulecanvas.model import UnknownModule
from modulecanvas.service import (
    CommunityService,
    InvalidCredentials,
    LogonIdTaken,
    UnknownTarget,
    UnknownUser,
    WeakPassword,
)
from modulecanvas.store import VersionConflict

from support import make_simple_package

FAST_CONFIG = ServiceConfig(scrypt_n=2**4, scrypt_r=8, scrypt_p=1)


def make_service(store_path=None):
    config = ServiceConfig(
        scrypt_n=2**4, scrypt_r=8, scrypt_p=1, store_path=str(store_path) if store_path else None
    )
    return CommunityService(config)


def register(service, logon, avatar_name=None):
    return service.register(logon, "correct-horse-battery", avatar_name=avatar_name)


class TestRegistration:
    def test_register_and_login(self):
        service = make_service()
        result = register(service, "ada")
        assert result.avatar_name_notice is None
        assert result.account.avatar.species == "otter"
        login = service.login("ada", "correct-horse-battery")
        assert login["userId"] == result.account.user_id

    def test_duplicate_logon_rejected(self):
        service = make_service()
        register(service, "ada")
        with pytest.raises(LogonIdTaken):
            register(service, "ada")

    def test_weak_password_rejected(self):
        service = make_service()
        with pytest.raises(WeakPassword):
            service.register("ada", "short")

    def test_duplicate_avatar_name_is_allowed_with_notice(self):
        service = make_service()
        register(service, "ada", avatar_name="Lutra")
        result = register(service, "grace", avatar_name="Lutra")
        assert result.account.avatar.name == "Lutra"
        assert "Lutra" in result.avatar_name_notice

    def test_password_never_stored_in_clear(self):
        service = make_service()
        result = register(service, "ada")
        assert "correct-horse-battery" not in result.account.password_hash
        assert result.account.password_hash.startswith("scrypt$")

    def test_bad_password_rejected_on_login(self):
        service = make_service()
        register(service, "ada")
        with pytest.raises(InvalidCredentials):
            service.login("ada", "wrong-password-entirely")

    def test_concurrent_duplicate_registration_has_one_winner(self):
        for _ in range(10):
            service = make_service()
            outcomes = []

            def attempt():
                try:
                    register(service, "racer")
                    outcomes.append("ok")
                except LogonIdTaken:
                    outcomes.append("taken")

            threads = [threading.Thread(target=attempt) for _ in range(2)]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert sorted(outcomes) == ["ok", "taken"]


class TestChat:
    def setup_service(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        bob = register(service, "bob").account.user_id
        quiz = service.import_package(
            write_package(make_simple_package("QuizRunner", "Quiz")), ada
        )
        return service, ada, bob, quiz["moduleId"]

    def test_suggest_template_renders_with_module_title(self):
        service, ada, bob, quiz = self.setup_service()
        message = service.send_chat(ada, bob, "T-SUGGEST", {"module": quiz})
        assert message["rendered"] == "you should add [Quiz] to your composition!"

    def test_like_template_without_slots(self):
        service, ada, bob, _ = self.setup_service()
        message = service.send_chat(ada, bob, "T-LIKE", {})
        assert message["rendered"] == "I like this module!"

    def test_unknown_template_rejected(self):
        service, ada, bob, _ = self.setup_service()
        with pytest.raises(UnknownTemplate):
            service.send_chat(ada, bob, "T-FREETEXT", {})

    def test_extra_slot_rejected(self):
        service, ada, bob, quiz = self.setup_service()
        with pytest.raises(UnresolvedSlot):
            service.send_chat(ada, bob, "T-LIKE", {"module": quiz})

    def test_missing_slot_rejected(self):
        service, ada, bob, _ = self.setup_service()
        with pytest.raises(UnresolvedSlot):
            service.send_chat(ada, bob, "T-SUGGEST", {})

    def test_unresolvable_module_slot_rejected(self):
        service, ada, bob, _ = self.setup_service()
        with pytest.raises(UnknownModule):
            service.send_chat(ada, bob, "T-SUGGEST", {"module": "ghost"})

    def test_every_template_renders_in_every_locale(self):
        service, ada, bob, quiz = self.setup_service()
        for template_id in service.catalog.templates:
            slots = {
                slot: quiz for slot in service.catalog.required_slots(template_id)
            }
            service.send_chat(ada, bob, template_id, slots)
        for locale in service.catalog.locales:
            inbox = service.inbox(bob, locale=locale)
            assert len(inbox) == len(service.catalog.templates)
            for message in inbox:
                assert message["rendered"]

    def test_catalog_has_text_for_every_locale(self):
        from modulecanvas.chat import ChatCatalog

        catalog = ChatCatalog.default()
        for template_id, template in catalog.templates.items():
            for locale in catalog.locales:
                assert template["text"].get(locale), (template_id, locale)

    def test_inbox_delivery(self):
        service, ada, bob, quiz = self.setup_service()
        service.send_chat(ada, bob, "T-THANKS", {})
        inbox = service.inbox(bob)
        assert len(inbox) == 1
        assert inbox[0]["fromUser"] == ada
        assert service.inbox(ada) == []


class TestLikesAndFavourites:
    def setup_service(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        bob = register(service, "bob").account.user_id
        created = service.create_composition("English test", ada)
        return service, ada, bob, created["module"]["moduleId"]

    def test_like_is_idempotent(self):
        service, ada, bob, module_id = self.setup_service()
        assert service.like(bob, module_id)["likes"] == 1
        assert service.like(bob, module_id)["likes"] == 1
        assert service.like(ada, module_id)["likes"] == 2

    def test_like_own_module_is_allowed_but_earns_nothing(self):
        service, ada, _, module_id = self.setup_service()
        service.like(ada, module_id)
        assert service.like_count(module_id) == 1
        assert service.rewards(ada)["totalPoints"] == 0

    def test_module_view_reports_emptiness(self):
        service, ada, bob, module_id = self.setup_service()
        # a fresh composition holds only its start node: still empty
        assert service.get_module(module_id)["empty"] is True
        quiz = service.import_package(
            write_package(make_simple_package("QuizRunner", "Quiz", {"text": "hi"})),
            ada,
        )["moduleId"]
        assert service.get_module(quiz)["empty"] is False
        blank = service.import_package(
            write_package(make_simple_package("BlankPage", "Blank")), ada
        )["moduleId"]
        assert service.get_module(blank)["empty"] is True

    def test_like_unknown_module(self):
        service, ada, _, _ = self.setup_service()
        with pytest.raises(UnknownModule):
            service.like(ada, "ghost")

    def test_favourite_module_and_avatar(self):
        service, ada, bob, module_id = self.setup_service()
        service.favourite(bob, "module", module_id)
        service.favourite(bob, "avatar", ada)
        favs = service.list_favourites(bob)
        assert {"kind": "module", "id": module_id} in favs
        assert {"kind": "avatar", "id": ada} in favs

    def test_favourite_readd_is_idempotent(self):
        service, _, bob, module_id = self.setup_service()
        service.favourite(bob, "module", module_id)
        service.favourite(bob, "module", module_id)
        assert len(service.list_favourites(bob)) == 1

    def test_unknown_favourite_target(self):
        service, _, bob, _ = self.setup_service()
        with pytest.raises(UnknownTarget):
            service.favourite(bob, "widget", "x")
        with pytest.raises(UnknownModule):
            service.favourite(bob, "module", "ghost")


class TestSearch:
    def setup_service(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        bob = register(service, "bob").account.user_id
        quiz = service.import_package(
            write_package(make_simple_package("QuizRunner", "Maths quiz")), ada
        )["moduleId"]
        video = service.import_package(
            write_package(make_simple_package("VideoEmbed", "Intro video")), ada
        )["moduleId"]
        lesson = service.create_composition("Quiz lesson", ada)["module"]["moduleId"]
        return service, ada, bob, quiz, video, lesson

    def test_substring_match_case_insensitive(self):
        service, *_ = self.setup_service()
        titles = [r["title"] for r in service.search("QUIZ")["results"]]
        assert titles == ["Maths quiz", "Quiz lesson"]

    def test_type_filter_by_kind_and_content_type(self):
        service, ada, bob, quiz, video, lesson = self.setup_service()
        got = service.search("", type_filter="composite")["results"]
        assert [r["moduleId"] for r in got] == [lesson]
        got = service.search("", type_filter="QuizRunner")["results"]
        assert [r["moduleId"] for r in got] == [quiz]

    def test_empty_query_returns_everything_ranked(self):
        service, ada, bob, quiz, video, lesson = self.setup_service()
        assert len(service.search("")["results"]) == 3

    def test_favourites_rank_first_then_likes_then_title(self):
        service, ada, bob, quiz, video, lesson = self.setup_service()
        service.like(ada, video)
        service.like(bob, video)
        service.favourite(bob, "module", lesson)
        got = [r["moduleId"] for r in service.search("", user_id=bob)["results"]]
        assert got == [lesson, video, quiz]
        # title ascending breaks the remaining tie (Intro video vs Maths quiz)
        got_titles = [r["title"] for r in service.search("x-no-match")["results"]]
        assert got_titles == []

    def test_results_precede_create_new_affordance(self):
        service, *_ = self.setup_service()
        response = service.search("quiz")
        assert list(response.keys()) == ["results", "createNew"]
        assert response["createNew"] is True

    def test_search_is_deterministic(self):
        service, ada, bob, quiz, video, lesson = self.setup_service()
        service.like(ada, quiz)
        first = service.search("", user_id=bob)
        second = service.search("", user_id=bob)
        assert first == second


class TestCompositionFlow:
    def test_update_requires_matching_version(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        created = service.create_composition("Lesson", ada)
        composition_id = created["graph"]["compositionId"]
        graph = created["graph"]
        updated = service.update_composition(composition_id, graph, expected_version=1)
        assert updated["version"] == 2
        with pytest.raises(VersionConflict):
            service.update_composition(composition_id, graph, expected_version=1)

    def test_update_records_reuse_of_fresh_references(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        bob = register(service, "bob").account.user_id
        quiz = service.import_package(
            write_package(make_simple_package("QuizRunner", "Quiz")), ada
        )["moduleId"]
        created = service.create_composition("Lesson", bob)
        composition_id = created["graph"]["compositionId"]
        graph = created["graph"]
        graph["nodes"].append(
            {"nodeId": "n-quiz", "moduleRef": quiz, "displayLabel": None}
        )
        service.update_composition(
            composition_id, graph, expected_version=1, editor_id=bob
        )
        assert service.rewards(bob)["totalPoints"] == 2  # active reuse
        assert service.rewards(ada)["totalPoints"] == 1  # passive reused

    def test_validate_and_export_and_reimport(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        quiz = service.import_package(
            write_package(make_simple_package("QuizRunner", "Quiz")), ada
        )["moduleId"]
        created = service.create_composition("Lesson", ada)
        composition_id = created["graph"]["compositionId"]
        graph = created["graph"]
        start = graph["startNodeId"]
        graph["nodes"].append({"nodeId": "n-quiz", "moduleRef": quiz, "displayLabel": "Quiz"})
        graph["edges"].append(
            {"from": start, "to": "n-quiz", "condition": None, "priority": 0}
        )
        service.update_composition(composition_id, graph, expected_version=1)
        report = service.validate_composition(composition_id)
        assert report["errors"] == []
        data = service.export_composition(composition_id)
        package = read_package(data)
        assert package.content["composition"]["compositionId"] == composition_id
        imported = service.import_package(data, ada)
        assert imported["title"] == "Lesson"

    def test_derive_then_merge_through_service(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        bob = register(service, "bob").account.user_id
        created = service.create_composition("Lesson", ada)
        composition_id = created["graph"]["compositionId"]
        original_module = created["module"]["moduleId"]
        derived = service.derive_module(original_module, bob)
        fork_composition = derived["contentRef"]
        fork_view = service.get_composition(fork_composition)
        fork_graph = fork_view["graph"]
        fork_graph["nodes"][0]["displayLabel"] = "Renamed by bob"
        service.update_composition(
            fork_composition, fork_graph, expected_version=1, editor_id=bob
        )
        service.publish_module(derived["moduleId"])
        result = service.merge_composition(composition_id, derived["moduleId"])
        assert result["clean"] is True
        merged = service.get_composition(composition_id)
        assert merged["graph"]["nodes"][0]["displayLabel"] == "Renamed by bob"
        assert service.rewards(bob)["totalPoints"] == 3 + 5  # remix + merge accepted


class TestRunsAndReviews:
    def setup_lesson(self):
        service = make_service()
        ada = register(service, "ada").account.user_id
        quiz = service.import_package(
            write_package(make_simple_package("QuizRunner", "Quiz")), ada
        )["moduleId"]
        created = service.create_composition("Lesson", ada)
        composition_id = created["graph"]["compositionId"]
        graph = created["graph"]
        start = graph["startNodeId"]
        graph["nodes"].append({"nodeId": "n-quiz", "moduleRef": quiz, "displayLabel": None})
        graph["edges"].append(
            {"from": start, "to": "n-quiz", "condition": None, "priority": 0}
        )
        service.update_composition(composition_id, graph, expected_version=1)
        return service, ada, composition_id

    def test_run_to_completion_creates_review_item(self):
        service, ada, composition_id = self.setup_lesson()
        run = service.start_run(composition_id, ada)
        run = service.submit_run_outcome(
            run["sessionId"], {"nodeId": run["currentNode"], "scorePercent": 100}
        )
        run = service.submit_run_outcome(
            run["sessionId"], {"nodeId": "n-quiz", "scorePercent": 80}
        )
        assert run["status"] == "finished"
        due = service.reviews_due(ada)
        assert len(due) == 1
        reviewed = service.apply_review(due[0]["itemId"], grade=5)
        assert reviewed["repetitions"] == 1
        assert service.reviews_due(ada) == []  # due tomorrow now

    def test_trace_jsonl_export(self):
        service, ada, composition_id = self.setup_lesson()
        run = service.start_run(composition_id, ada)
        service.submit_run_outcome(
            run["sessionId"], {"nodeId": run["currentNode"], "scorePercent": 50}
        )
        jsonl = service.run_trace_jsonl(run["sessionId"])
        assert jsonl.count("\n") == 1

    def test_rewards_requires_known_user(self):
        service = make_service()
        with pytest.raises(UnknownUser):
            service.rewards("ghost")


class TestPersistence:
    def test_state_survives_restart(self, tmp_path):
        store_dir = tmp_path / "db"
        service = make_service(store_dir)
        ada = register(service, "ada").account.user_id
        bob = register(service, "bob").account.user_id
        quiz = service.import_package(
            write_package(make_simple_package("QuizRunner", "Quiz")), ada
        )["moduleId"]
        lesson = service.create_composition("Lesson", ada)
        service.like(bob, quiz)
        service.favourite(bob, "module", quiz)
        service.send_chat(ada, bob, "T-SUGGEST", {"module": quiz})
        service.store.close()

        reopened = make_service(store_dir)
        assert reopened.login("ada", "correct-horse-battery")["userId"] == ada
        assert reopened.like_count(quiz) == 1
        assert reopened.list_favourites(bob) == [{"kind": "module", "id": quiz}]
        assert len(reopened.inbox(bob)) == 1
        assert reopened.get_module(quiz)["title"] == "Quiz"
        view = reopened.get_composition(lesson["graph"]["compositionId"])
        assert view["module"]["title"] == "Lesson"
