// Copyright 2026 The ecp Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.


use clap::Parser;
use ecp_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let code = match ecp_cli::execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ecp: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
