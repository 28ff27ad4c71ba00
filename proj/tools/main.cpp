// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <memory>

#include "cli.hpp"

int main(int argc, char** argv) {
    using namespace neurosim::cli;
    CLI::App app{"neurosim: spiking network simulation, training and mixed-signal hardware modeling"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file of defaults, e.g. {\"train\": {\"epochs\": 5}}; flags win");

    Action action;
    register_synth(app, action);
    register_train(app, action);
    register_eval(app, action);
    register_msrun(app, action);
    register_report(app, action);
    register_compare(app, action);
    register_calibrate(app, action);

    try {
        app.parse(argc, argv);
        if (action) {
            action();
        }
        return kOk;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::FileError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const CLI::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    } catch (const neurosim::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const neurosim::Error& e) {
        // ConfigError, DecodeError, ContractViolation, Integrity/ProtocolError
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
