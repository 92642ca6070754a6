#include <doctest.h>

#include "malfam/errors.hpp"
#include "malfam/prompt.hpp"

using namespace malfam;

TEST_CASE("every builtin prompt satisfies the template invariants") {
    for (const std::string& id : PromptTemplate::builtin_ids()) {
        PromptTemplate prompt = PromptTemplate::builtin(id);
        CHECK(prompt.id == id);
        CHECK_NOTHROW(prompt.validate());
        CHECK(prompt.body.ends_with("Family:"));
        CHECK(prompt.max_input_chars == 12000);
        // the full ten-family list is present
        CHECK(prompt.body.find("Backdoor / Remote Access Trojan") != std::string::npos);
        CHECK(prompt.body.find("Bot / Botnet Client") != std::string::npos);
    }
    CHECK(PromptTemplate::builtin_ids().size() == 6);
    CHECK_THROWS_AS(PromptTemplate::builtin("P9"), ConfigError);
}

TEST_CASE("template validation rejects malformed bodies") {
    PromptTemplate prompt = PromptTemplate::builtin("P0");

    PromptTemplate missing_source = prompt;
    missing_source.body = "Detected imports: [API list]\nFamily:";
    CHECK_THROWS_AS(missing_source.validate(), ConfigError);

    PromptTemplate doubled = prompt;
    doubled.body = "[truncated][truncated]\nDetected imports: [API list]\nFamily:";
    CHECK_THROWS_AS(doubled.validate(), ConfigError);

    PromptTemplate no_terminal = prompt;
    no_terminal.body = "Source code: [truncated]\nDetected imports: [API list]\n";
    CHECK_THROWS_AS(no_terminal.validate(), ConfigError);
}

TEST_CASE("short code embeds untruncated; long code cuts at the limit") {
    PromptTemplate prompt = PromptTemplate::builtin("P2");
    prompt.max_input_chars = 1000;

    SampleRecord small{"s1", "int main(){}", {"CreateFileA", "WriteFile"}};
    std::string rendered = render_prompt(prompt, small);
    CHECK(rendered.find("int main(){}") != std::string::npos);
    CHECK(rendered.find("CreateFileA, WriteFile") != std::string::npos);
    CHECK(rendered.ends_with("Family:"));

    SampleRecord big{"s2", std::string(2000, 'x'), {"connect"}};
    std::string truncated = render_prompt(prompt, big);
    CHECK(truncated.find(std::string(1000, 'x')) != std::string::npos);
    CHECK(truncated.find(std::string(1001, 'x')) == std::string::npos);
}

TEST_CASE("rendering is byte-deterministic and preserves import order") {
    PromptTemplate prompt = PromptTemplate::builtin("P1");
    SampleRecord sample{"s1", "void f();", {"zeta", "alpha", "midway"}};
    std::string first = render_prompt(prompt, sample);
    std::string second = render_prompt(prompt, sample);
    CHECK(first == second);
    CHECK(first.find("zeta, alpha, midway") != std::string::npos);
}

TEST_CASE("sample text that looks like a placeholder is not substituted") {
    PromptTemplate prompt = PromptTemplate::builtin("P2");
    SampleRecord sneaky{"s1", "char* s = \"[API list]\";", {"RealImport"}};
    std::string rendered = render_prompt(prompt, sneaky);
    // the injected token survives verbatim; the real placeholder got the imports
    CHECK(rendered.find("char* s = \"[API list]\";") != std::string::npos);
    CHECK(rendered.find("Detected imports: RealImport") != std::string::npos);
}
