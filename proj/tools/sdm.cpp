#include <iostream>

#include "commands.hpp"
#include "sdm/dataset/csv_io.hpp"
#include "sdm/error.hpp"

namespace {

// Errors go to stderr as one machine-parseable line.
int report(std::string_view code, int exit_code, const std::string& message) {
  std::string flat = message;
  for (char& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
    if (c == '"') c = '\'';
  }
  std::cerr << "error code=" << code << " exit=" << exit_code << " message=\"" << flat << "\"\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Station-based car-sharing demand modelling toolkit", "sdm"};
  app.set_version_flag("--version", sdm::data::toolkit_version());
  app.require_subcommand(1);
  sdm::cli::add_synth(app);
  sdm::cli::add_fuse(app);
  sdm::cli::add_select(app);
  sdm::cli::add_fit(app);
  sdm::cli::add_evaluate(app);
  sdm::cli::add_ablate(app);
  sdm::cli::add_whatif(app);
  sdm::cli::add_serve(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("invalid_argument", static_cast<int>(sdm::ErrorCode::invalid_argument), e.what());
  } catch (const sdm::Error& e) {
    return report(sdm::to_string(e.code()), static_cast<int>(e.code()), e.what());
  } catch (const std::exception& e) {
    return report("internal", 1, e.what());
  }
  return 0;
}
