#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ontorec/commands.hpp"
#include "ontorec/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ontorec - ontology-assisted collaborative filtering engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string fields_override;
    app.add_option("--config", config_path, "path to the run configuration file")->required();
    app.add_option("--out", out_override, "override output.dir from the config");

    auto* ingest = app.add_subcommand("ingest", "parse and preprocess the rating data");
    ingest->add_option("--hierarchy-fields", fields_override,
                       "comma-separated taxonomy levels, e.g. publisher,author");

    auto* taxonomy = app.add_subcommand("taxonomy", "rebuild taxonomy.json from the artifact");
    taxonomy->add_option("--hierarchy-fields", fields_override,
                         "comma-separated taxonomy levels, e.g. publisher,author");

    auto* evaluate =
        app.add_subcommand("evaluate", "5-fold cross-validation of CF, CB, CF_NMF and HYBRID");

    std::string user_id;
    int top_n = 10;
    auto* recommend = app.add_subcommand("recommend", "top-N unrated items for one user");
    recommend->add_option("--user", user_id, "user id to recommend for")->required();
    recommend->add_option("--top", top_n, "number of items to return");

    CLI11_PARSE(app, argc, argv);

    try {
        ontorec::RunConfig cfg = ontorec::parse_config(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (!fields_override.empty())
            cfg.hierarchy_fields = ontorec::detail::split_comma(fields_override);

        if (ingest->parsed()) ontorec::cmd_ingest(cfg);
        if (taxonomy->parsed()) ontorec::cmd_taxonomy(cfg);
        if (evaluate->parsed()) ontorec::cmd_evaluate(cfg);
        if (recommend->parsed()) ontorec::cmd_recommend(cfg, user_id, top_n);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
