from app.pipeline.graph_flow import PipelineState, WavePipelineGraph
