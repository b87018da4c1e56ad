#include "diarkit/pipeline.hpp"

#include <algorithm>

#include "diarkit/error.hpp"
#include "diarkit/scoring.hpp"

namespace diarkit {
namespace {

Timeline clip_to(Timeline t, double duration) {
  Timeline out{t.file_id, {}};
  for (auto& iv : t.intervals) {
    iv.end = std::min(iv.end, duration);
    if (iv.end > iv.start) out.intervals.push_back(iv);
  }
  return out;
}

std::filesystem::path external_labels_for(const std::filesystem::path& labels, const std::string& file_id) {
  if (!std::filesystem::is_directory(labels)) return labels;
  for (const char* ext : {".txt", ".lab", ".rttm"}) {
    auto candidate = labels / (file_id + ext);
    if (std::filesystem::exists(candidate)) return candidate;
  }
  throw Error(Errc::Io, "no VAD labels for " + file_id + " in " + labels.string());
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const PipelineConfig& cfg) {
  if (cfg.embedder.kind == EmbeddingProviderConfig::Kind::FileStore) {
    return std::make_unique<EmbeddingStore>(EmbeddingStore::load(cfg.embedder.store_path));
  }
  return std::make_unique<BuiltinEmbedder>(static_cast<std::size_t>(cfg.mel.n_mels), cfg.embedder.dim,
                                           cfg.embedder.seed);
}

Timeline detect_speech(const AudioBuffer& audio, const PipelineConfig& cfg) {
  Timeline speech;
  if (cfg.vad_mode == VadMode::External) {
    speech = load_external_vad(external_labels_for(cfg.vad_labels, audio.source_id), audio.source_id);
  } else {
    speech = run_energy_vad(audio, cfg.vad);
  }
  speech.file_id = audio.source_id;
  return clip_to(std::move(speech), audio.duration());
}

DiarizeResult diarize_buffer(const AudioBuffer& audio, const PipelineConfig& cfg, const Timeline* speech,
                             const EmbeddingProvider* provider) {
  cfg.validate();
  if (audio.sample_rate != cfg.sample_rate) throw RateMismatch(audio.sample_rate, cfg.sample_rate);

  DiarizeResult result;
  result.file_id = audio.source_id;
  result.speech = speech ? clip_to(*speech, audio.duration()) : detect_speech(audio, cfg);
  result.speech.file_id = audio.source_id;
  result.subsegments = slide_windows(result.speech, cfg.window);
  result.hypothesis.file_id = audio.source_id;

  if (audio.samples.size() >= cfg.mel.win_samples(audio.sample_rate)) {
    result.features = log_mel(audio, cfg.mel);
  }
  if (result.subsegments.empty()) return result;

  std::unique_ptr<EmbeddingProvider> owned;
  if (!provider) {
    owned = make_provider(cfg);
    provider = owned.get();
  }
  const Matrix embeddings = embed_all(*provider, audio.source_id, result.features, result.subsegments);

  if (cfg.clusterer == ClustererKind::Spectral) {
    SpectralOptions opts;
    opts.k_override = cfg.num_speakers;
    opts.k_max = cfg.max_speakers;
    opts.seed = cfg.seed;
    if (opts.k_override) opts.k_override = std::min<int>(*opts.k_override, static_cast<int>(embeddings.rows()));
    result.assignment = spectral_cluster(embeddings, opts);
  } else {
    AhcOptions opts;
    opts.distance_threshold = cfg.ahc_threshold;
    opts.k_max = cfg.max_speakers;
    if (cfg.num_speakers) {
      const int k = std::min<int>(*cfg.num_speakers, static_cast<int>(embeddings.rows()));
      result.assignment = cut_to_k(embeddings.rows(), average_linkage(cosine_distance_matrix(embeddings)), k);
    } else {
      result.assignment = ahc_cluster(embeddings, opts);
    }
  }

  result.hypothesis = assemble_hypothesis(result.subsegments, result.assignment, audio.source_id);
  result.records = timeline_to_records(result.hypothesis);
  result.num_speakers = result.assignment.k;
  return result;
}

}  // namespace diarkit
