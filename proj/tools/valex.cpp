// valex: experiment driver for value extraction from short-video scripts.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "valex/error.hpp"
#include "valex/pipeline.hpp"

namespace {

int report(const valex::CommandResult& result) {
  for (const auto& d : result.diagnostics) std::cerr << d << '\n';
  for (const auto& o : result.outputs) std::cout << o.generic_string() << '\n';
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extract personal values from short-video corpora and score the extractors"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string pipeline_id;

  auto with_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override a config key, e.g. --set train.epochs=5");
    return sub;
  };
  auto with_pipeline = [&](CLI::App* sub) {
    sub->add_option("-p,--pipeline", pipeline_id, "Pipeline id from the config")->required();
    return sub;
  };

  auto* ingest = with_config(app.add_subcommand("ingest", "Validate corpus and gold; write corpus statistics"));
  auto* scripts = with_config(app.add_subcommand("scripts", "Extract a script per video (resumable)"));
  auto* extract = with_pipeline(with_config(app.add_subcommand("extract-llm", "Run an LLM pipeline on the test split")));
  auto* train = with_pipeline(with_config(app.add_subcommand("train", "Train a supervised pipeline's model")));
  auto* predict = with_pipeline(with_config(app.add_subcommand("predict", "Predict the test split with a trained model")));
  auto* evaluate = with_config(app.add_subcommand("evaluate", "Score predictions; write reports, comparison, plots"));
  auto* run = with_config(app.add_subcommand("run", "All stages for every configured pipeline"));

  valex::AgreementOptions agreement_opts;
  auto* agreement = app.add_subcommand("agreement", "Inter-rater agreement (AC1, kappa, percent)");
  agreement->add_option("-a,--annotations", agreement_opts.annotations, "Two-rater annotation file")
      ->required()
      ->check(CLI::ExistingFile);
  agreement->add_option("-r,--resolver", agreement_opts.resolver_id, "Annotator id whose rows resolve disputes");
  agreement->add_option("-o,--out", agreement_opts.output_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (agreement->parsed()) return report(valex::cmd_agreement(agreement_opts));

    const auto config = valex::load_run_config(config_path, overrides);
    if (ingest->parsed()) return report(valex::cmd_ingest(config));
    if (scripts->parsed()) return report(valex::cmd_scripts(config));
    if (extract->parsed()) return report(valex::cmd_extract_llm(config, pipeline_id));
    if (train->parsed()) return report(valex::cmd_train(config, pipeline_id));
    if (predict->parsed()) return report(valex::cmd_predict(config, pipeline_id));
    if (evaluate->parsed()) return report(valex::cmd_evaluate(config));
    if (run->parsed()) return report(valex::cmd_run(config));
  } catch (const valex::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return valex::kExitValidation;
  }
  return valex::kExitValidation;
}
