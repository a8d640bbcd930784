use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use fastgen::bench::bench_exp;
use fastgen::dlog::bsgs_dlog;
use fastgen::group::{generate_params_bounded, parse_hex, DEFAULT_MAX_ATTEMPTS};
use fastgen::oracle::{amplify, make_noisy_dh_oracle, make_perfect_dh_oracle, make_perfect_dl_oracle, DhOracle, DlOracle, NoisySpec};
use fastgen::pkc::{
    celebrity_encrypt, classical_decrypt, classical_encrypt, subscriber_decrypt, Ciphertext, CelebrityKey,
    ClassicalCelebrityKey, SubscriberKey,
};
use fastgen::protocol::{agree_with_keys, keygen, run_agreement, KeyFile, KeyPair, Transcript, TranscriptFile};
use fastgen::reduction::{dh_any_base, dh_any_base_query_bound, dl_any_base};
use fastgen::standard::{
    authority_recover, forge_standard, MdhOracle, forge_standard_with_trapdoor, PublishedStandard, SimulatedMdhOracle,
    StandardFile, Trapdoor, TrapdoorFile,
};
use fastgen::{Error, GroupElement, GroupParams, Result};

#[derive(Parser)]
#[command(name = "fastgen", version, about = "Diffie-Hellman with fast generators, oracle reductions and trapdoored standards")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a safe-prime group with generator 2.
    ParamsGen {
        #[arg(long)]
        bits: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
        max_attempts: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the two-party key agreement in-process.
    Agree {
        #[arg(long)]
        params: PathBuf,
        /// Generator in hex; defaults to the fast generator.
        #[arg(long)]
        generator: Option<String>,
        #[arg(long)]
        seed_a: Option<u64>,
        #[arg(long)]
        seed_b: Option<u64>,
        /// Fix Alice's secret (hex) instead of drawing it.
        #[arg(long)]
        secret_a: Option<String>,
        /// Fix Bob's secret (hex) instead of drawing it.
        #[arg(long)]
        secret_b: Option<String>,
        #[arg(long)]
        transcript_out: Option<PathBuf>,
        #[arg(long)]
        key_a_out: Option<PathBuf>,
        #[arg(long)]
        key_b_out: Option<PathBuf>,
    },
    /// Count operations of random-base vs fast-base exponentiation.
    BenchExp {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Also report wall-clock times (not reproducible).
        #[arg(long)]
        wall_time: bool,
    },
    /// Solve DH for base g using a DH oracle for the fast generator.
    ReduceDhp {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        base: String,
        /// g^x,g^y in hex.
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
    },
    /// Solve DL for base g using a DL oracle for the fast generator.
    ReduceDlp {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        base: String,
        /// g^x in hex.
        #[arg(long)]
        inputs: String,
    },
    /// Answer a DH query through a noisy oracle amplified by self-reduction.
    Amplify {
        #[arg(long)]
        params: PathBuf,
        /// Base of the query; defaults to the fast generator.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.01)]
        target_error: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Publish a standard whose generator hides a trapdoor exponent.
    Forge {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Fix the trapdoor (hex) instead of drawing it.
        #[arg(long)]
        trapdoor: Option<String>,
        #[arg(long)]
        standard_out: PathBuf,
        #[arg(long)]
        trapdoor_out: PathBuf,
    },
    /// Recover a session key from a transcript using the trapdoor.
    Recover {
        #[arg(long)]
        standard: PathBuf,
        #[arg(long)]
        trapdoor: PathBuf,
        #[arg(long, conflicts_with_all = ["seed_a", "seed_b"])]
        transcript: Option<PathBuf>,
        /// Demo mode: run an honest agreement with these seeds and compare.
        #[arg(long, requires = "seed_b")]
        seed_a: Option<u64>,
        #[arg(long, requires = "seed_a")]
        seed_b: Option<u64>,
    },
    /// Generate a key for the broadcast scheme.
    PkcKeygen {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum)]
        role: Role,
        /// Celebrity key file whose public value is the subscriber's generator.
        #[arg(long)]
        celebrity: Option<PathBuf>,
        /// Explicit generator in hex (subscriber and classical roles).
        #[arg(long)]
        generator: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a file to a subscriber.
    PkcEncrypt {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        celebrity_key: PathBuf,
        /// Subscriber key file (only the public value is read).
        #[arg(long)]
        recipient: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use the classical static-DH variant.
        #[arg(long)]
        classical: bool,
        /// Generator of the classical variant; defaults to the fast generator.
        #[arg(long)]
        generator: Option<String>,
    },
    /// Decrypt a file as a subscriber.
    PkcDecrypt {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        key: PathBuf,
        /// Celebrity key file (only the public value is read).
        #[arg(long)]
        celebrity: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        classical: bool,
        #[arg(long)]
        generator: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Role {
    Celebrity,
    Subscriber,
    Classical,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn seed_or_entropy(seed: Option<u64>, name: &str) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::thread_rng().next_u64();
        eprintln!("{name}: {s}");
        s
    })
}

fn load_params(path: &Path) -> Result<GroupParams> {
    GroupParams::from_json(&fs::read_to_string(path)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let value = serde_json::to_value(value)?;
    fs::write(path, serde_json::to_string_pretty(&value)? + "\n")?;
    Ok(())
}

fn print(value: Value) {
    println!("{}", serde_json::to_string_pretty(&value).expect("json value"));
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "MATCH"
    } else {
        "MISMATCH"
    }
}

fn pair(inputs: &[String], params: &GroupParams) -> Result<(GroupElement, GroupElement)> {
    match inputs {
        [x, y] => Ok((params.element_from_hex(x)?, params.element_from_hex(y)?)),
        _ => Err(Error::InvalidArgument("--inputs takes two comma-separated hex elements".into())),
    }
}

fn generator_or_f(params: &GroupParams, hex: Option<&str>) -> Result<GroupElement> {
    match hex {
        Some(h) => params.element_from_hex(h),
        None => Ok(params.generator()),
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::ParamsGen { bits, seed, max_attempts, out } => {
            let seed = seed_or_entropy(seed, "seed");
            let params = generate_params_bounded(bits, seed, max_attempts)?;
            if let Some(out) = out {
                write_json(&out, &params.to_file())?;
            }
            print(serde_json::to_value(params.to_file())?);
            Ok(true)
        }

        Command::Agree { params, generator, seed_a, seed_b, secret_a, secret_b, transcript_out, key_a_out, key_b_out } => {
            let params = load_params(&params)?;
            let g = generator_or_f(&params, generator.as_deref())?;
            let party = |secret: Option<String>, seed: Option<u64>, name: &str| -> Result<KeyPair> {
                match secret {
                    Some(s) => KeyPair::from_secret(&params, &g, &parse_hex(&s)?),
                    None => keygen(&params, &g, &mut ChaCha20Rng::seed_from_u64(seed_or_entropy(seed, name))),
                }
            };
            let alice = party(secret_a, seed_a, "seed-a")?;
            let bob = party(secret_b, seed_b, "seed-b")?;
            let run = agree_with_keys(&params, &g, &alice, &bob)?;
            if let Some(path) = transcript_out {
                write_json(&path, &run.transcript.to_file())?;
            }
            if let Some(path) = key_a_out {
                alice.to_file().write(&path)?;
            }
            if let Some(path) = key_b_out {
                bob.to_file().write(&path)?;
            }
            print(json!({
                "key_a": run.key_alice.to_hex(),
                "key_b": run.key_bob.to_hex(),
                "match": run.keys_match(),
                "shared": run.shared_alice.to_hex(),
                "transcript": serde_json::to_value(run.transcript.to_file())?,
            }));
            Ok(run.keys_match())
        }

        Command::BenchExp { params, trials, seed, wall_time } => {
            let params = load_params(&params)?;
            let seed = seed_or_entropy(seed, "seed");
            let report = bench_exp(&params, trials, seed, wall_time)?;
            println!("{}", report.to_json());
            Ok(true)
        }

        Command::ReduceDhp { params, base, inputs } => {
            let params = load_params(&params)?;
            let g = params.element_from_hex(&base)?;
            let (gx, gy) = pair(&inputs, &params)?;
            let mut oracle = make_perfect_dh_oracle(&params, &params.generator())?;
            let answer = dh_any_base(&mut oracle, &g, &gx, &gy, &params)?;
            let truth = brute_force_dh(&params, &g, &gx, &gy)?;
            print(json!({
                "answer": answer.to_hex(),
                "ground_truth": truth.to_hex(),
                "queries": oracle.query_count(),
                "query_bound": dh_any_base_query_bound(params.p()),
                "verdict": verdict(answer == truth),
            }));
            Ok(answer == truth)
        }

        Command::ReduceDlp { params, base, inputs } => {
            let params = load_params(&params)?;
            let g = params.element_from_hex(&base)?;
            let gx = params.element_from_hex(&inputs)?;
            let mut oracle = make_perfect_dl_oracle(&params, &params.generator())?;
            let answer = dl_any_base(&mut oracle, &g, &gx, &params)?;
            let truth = bsgs_dlog(&gx, &g, &params)?;
            print(json!({
                "answer": answer.to_hex(),
                "ground_truth": truth.to_hex(),
                "queries": oracle.query_count(),
                "verdict": verdict(answer == truth),
            }));
            Ok(answer == truth)
        }

        Command::Amplify { params, base, inputs, epsilon, target_error, seed } => {
            let params = load_params(&params)?;
            let g = generator_or_f(&params, base.as_deref())?;
            let (gx, gy) = pair(&inputs, &params)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_entropy(seed, "seed"));
            let perfect = make_perfect_dh_oracle(&params, &params.generator())?;
            let noisy = make_noisy_dh_oracle(perfect, NoisySpec::new(epsilon, rng.next_u64())?, &params);
            let mut amplified = amplify(noisy, epsilon, target_error, rng.next_u64(), &params)?;
            let answer = dh_any_base(&mut amplified, &g, &gx, &gy, &params)?;
            let truth = brute_force_dh(&params, &g, &gx, &gy)?;
            print(json!({
                "answer": answer.to_hex(),
                "ground_truth": truth.to_hex(),
                "inner_queries": amplified.inner().query_count(),
                "queries": amplified.query_count(),
                "rounds": amplified.rounds(),
                "verdict": verdict(answer == truth),
            }));
            Ok(answer == truth)
        }

        Command::Forge { params, seed, trapdoor, standard_out, trapdoor_out } => {
            let params = load_params(&params)?;
            let (standard, td) = match trapdoor {
                Some(t) => forge_standard_with_trapdoor(&params, &parse_hex(&t)?)?,
                None => forge_standard(&params, &mut ChaCha20Rng::seed_from_u64(seed_or_entropy(seed, "seed"))),
            };
            write_json(&standard_out, &standard.to_file())?;
            write_secret_json(&trapdoor_out, &td.to_file())?;
            print(serde_json::to_value(standard.to_file())?);
            Ok(true)
        }

        Command::Recover { standard, trapdoor, transcript, seed_a, seed_b } => {
            let standard_file: StandardFile = read_json(&standard)?;
            let trapdoor_file: TrapdoorFile = read_json(&trapdoor)?;
            let (standard, td) = load_standard(&standard_file, &trapdoor_file)?;
            let params = standard.params();
            let mut oracle = SimulatedMdhOracle::with_base(params, td.f())?;
            match (transcript, seed_a, seed_b) {
                (Some(path), _, _) => {
                    let file: TranscriptFile = read_json(&path)?;
                    let transcript = Transcript::from_file(&file, params)?;
                    let key = authority_recover(&td, &standard, &transcript, &mut oracle)?;
                    print(json!({ "queries": oracle.query_count(), "recovered_key": key.to_hex() }));
                    Ok(true)
                }
                (None, Some(a), Some(b)) => {
                    let run = run_agreement(params, standard.g(), a, b)?;
                    let key = authority_recover(&td, &standard, &run.transcript, &mut oracle)?;
                    let ok = key == run.key_alice && key == run.key_bob;
                    print(json!({
                        "honest_key": run.key_alice.to_hex(),
                        "recovered_key": key.to_hex(),
                        "verdict": verdict(ok),
                    }));
                    Ok(ok)
                }
                _ => Err(Error::InvalidArgument("give --transcript or both --seed-a and --seed-b".into())),
            }
        }

        Command::PkcKeygen { params, role, celebrity, generator, seed, out } => {
            let params = load_params(&params)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed_or_entropy(seed, "seed"));
            let file = match role {
                Role::Celebrity => {
                    let ck = fastgen::pkc::celebrity_keygen(&params, &mut rng);
                    KeyFile { public: ck.g().to_hex(), secret: Some(ck.r().to_hex()) }
                }
                Role::Subscriber => {
                    let g = match (&generator, &celebrity) {
                        (Some(h), _) => params.element_from_hex(h)?,
                        (None, Some(path)) => KeyFile::read(path)?.public(&params)?,
                        (None, None) => params.generator(),
                    };
                    let sk = fastgen::pkc::subscriber_keygen(&g, &params, &mut rng)?;
                    KeyFile { public: sk.public().to_hex(), secret: Some(sk.a().to_hex()) }
                }
                Role::Classical => {
                    let g = generator_or_f(&params, generator.as_deref())?;
                    let ck = fastgen::pkc::classical_celebrity_keygen(&g, &params, &mut rng)?;
                    KeyFile { public: ck.public().to_hex(), secret: Some(ck.b().to_hex()) }
                }
            };
            file.write(&out)?;
            print(json!({ "public": file.public }));
            Ok(true)
        }

        Command::PkcEncrypt { params, celebrity_key, recipient, input, out, classical, generator } => {
            let params = load_params(&params)?;
            let key_file = KeyFile::read(&celebrity_key)?;
            let recipient = KeyFile::read(&recipient)?.public(&params)?;
            let msg = fs::read(&input)?;
            let ct = if classical {
                let g = generator_or_f(&params, generator.as_deref())?;
                let ck = ClassicalCelebrityKey::from_secret(&g, &params, &key_file.secret()?)?;
                check_public(ck.public(), &key_file, &params)?;
                classical_encrypt(&ck, &recipient, &msg, &params)?
            } else {
                let ck = CelebrityKey::from_secret(&params, &key_file.secret()?)?;
                check_public(ck.g(), &key_file, &params)?;
                let mut oracle = fastgen::standard::make_simulated_mdh_oracle(&params)?;
                celebrity_encrypt(&ck, &recipient, &msg, &mut oracle, &params)?
            };
            fs::write(&out, ct.to_bytes())?;
            print(json!({ "body_len": ct.body.len(), "plaintext_len": msg.len(), "version": ct.version }));
            Ok(true)
        }

        Command::PkcDecrypt { params, key, celebrity, input, out, classical, generator } => {
            let params = load_params(&params)?;
            let key_file = KeyFile::read(&key)?;
            let celebrity_public = KeyFile::read(&celebrity)?.public(&params)?;
            let ct = Ciphertext::from_bytes(&fs::read(&input)?)?;
            let msg = if classical {
                let g = generator_or_f(&params, generator.as_deref())?;
                let sk = SubscriberKey::from_secret(&g, &params, &key_file.secret()?)?;
                check_public(sk.public(), &key_file, &params)?;
                classical_decrypt(&sk, &celebrity_public, &ct, &params)?
            } else {
                let sk = SubscriberKey::from_secret(&celebrity_public, &params, &key_file.secret()?)?;
                check_public(sk.public(), &key_file, &params)?;
                subscriber_decrypt(&sk, &celebrity_public, &ct, &params)?
            };
            fs::write(&out, &msg)?;
            print(json!({ "plaintext_len": msg.len() }));
            Ok(true)
        }
    }
}

fn check_public(derived: &GroupElement, file: &KeyFile, params: &GroupParams) -> Result<()> {
    if derived != &file.public(params)? {
        return Err(Error::InvalidArgument("key file public value does not match its secret".into()));
    }
    Ok(())
}

fn brute_force_dh(params: &GroupParams, g: &GroupElement, gx: &GroupElement, gy: &GroupElement) -> Result<GroupElement> {
    let x = bsgs_dlog(gx, g, params)?;
    let y = bsgs_dlog(gy, g, params)?;
    Ok(params.pow(g, &params.mul_exponents(&x, &y)))
}

/// Rebuilds the standard around the trapdoor's `f` when it differs from the
/// smallest generator.
fn load_standard(standard: &StandardFile, trapdoor: &TrapdoorFile) -> Result<(PublishedStandard, Trapdoor)> {
    let published = PublishedStandard::from_file(standard)?;
    let f = parse_hex(&trapdoor.f)?;
    let published = if &f == published.params().f() {
        published
    } else {
        let params = GroupParams::new(published.params().q().clone(), published.params().p().clone(), f)
            .map_err(|_| Error::TrapdoorMismatch)?;
        PublishedStandard::new(&params, published.g().clone())?
    };
    let td = Trapdoor::from_file(trapdoor, published.params()).map_err(|e| match e {
        Error::NotMember(_) | Error::Identity | Error::ZeroExponent => Error::TrapdoorMismatch,
        other => other,
    })?;
    Ok((published, td))
}

fn write_secret_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = serde_json::to_value(value)?;
    let mut opts = fs::OpenOptions::new();
    opts.write(true).create(true).truncate(true);
    #[cfg(unix)]
    {
        use std::os::unix::fs::OpenOptionsExt;
        opts.mode(0o600);
    }
    use std::io::Write;
    let mut f = opts.open(path)?;
    f.write_all((serde_json::to_string_pretty(&file)? + "\n").as_bytes())?;
    Ok(())
}
