import io
import json
import logging

from skewbench.services.logging import StructuredLogger, log_timing, run_context, setup_logging


class TestStructuredLogger:
    """Tests for package logging setup."""

    def test_json_records(self):
        """Test JSON lines carry level, logger and extra fields."""
        stream = io.StringIO()
        StructuredLogger(level="INFO", json_format=True, stream=stream)
        logging.getLogger("skewbench.services.metrics").info("Scored", extra={"aupr": 0.25})
        record = json.loads(stream.getvalue().strip())
        assert record["message"] == "Scored"
        assert record["level"] == "INFO"
        assert record["logger"] == "skewbench.services.metrics"
        assert record["aupr"] == 0.25
        assert "timestamp" in record

    def test_plain_records(self):
        """Test the plain format is a single human-readable line."""
        stream = io.StringIO()
        structured = StructuredLogger(level="INFO", json_format=False, stream=stream)
        structured.logger.warning("Check failed", extra={"check": "order"})
        line = stream.getvalue().strip()
        assert "WARNING" in line
        assert line.endswith("Check failed")

    def test_level_filters(self):
        """Test records below the level are dropped."""
        stream = io.StringIO()
        StructuredLogger(level="WARNING", json_format=True, stream=stream)
        logging.getLogger("skewbench.services.bias").info("quiet")
        assert stream.getvalue() == ""

    def test_error_includes_exception(self):
        """Test error records carry the traceback."""
        stream = io.StringIO()
        structured = StructuredLogger(level="INFO", json_format=True, stream=stream)
        try:
            raise ValueError("boom")
        except ValueError:
            structured.logger.exception("Run failed")
        record = json.loads(stream.getvalue().strip())
        assert "ValueError: boom" in record["exception"]

    def test_run_context_fields(self):
        """Test records inside a run carry its experiment and hash, and only there."""
        stream = io.StringIO()
        StructuredLogger(level="INFO", json_format=True, stream=stream)
        log = logging.getLogger("skewbench.services.experiments")
        with run_context(experiment="threeway", config_hash="abc123def456"):
            log.info("Starting experiment")
        log.info("After run")
        inside, after = [json.loads(line) for line in stream.getvalue().splitlines()]
        assert inside["experiment"] == "threeway"
        assert inside["config_hash"] == "abc123def456"
        assert "experiment" not in after

    def test_setup_logging_with_file(self, tmp_path):
        """Test records are mirrored into the log file."""
        log_file = tmp_path / "run.log"
        structured = setup_logging(level="INFO", json_format=True, log_file=str(log_file))
        structured.logger.info("Wrote table", extra={"path": "aupr_table.csv"})
        for handler in structured.logger.handlers:
            handler.flush()
        assert json.loads(log_file.read_text().strip())["path"] == "aupr_table.csv"


class TestLogTiming:
    """Tests for the timing decorator."""

    def test_reports_duration(self, caplog):
        """Test the wrapped call logs its duration and keeps its result."""

        @log_timing(logging.getLogger("skewbench.tests"))
        def work(x):
            return x * 2

        with caplog.at_level("DEBUG", logger="skewbench.tests"):
            assert work(4) == 8
        (record,) = [r for r in caplog.records if r.name == "skewbench.tests"]
        assert record.function_name == "work"
        assert record.duration_ms >= 0
