import json

import pytest

from jsonschema import validate as jsonschema_validate

# noinspection PyProtectedMember
from rimforge.cli import _load_report_schema, _format_text, _raw_inputs, _Outcome, STATUS_ERROR, \
    STATUS_INDETERMINATE, STATUS_OK


def _invoke(app_runner, tmp_path, args):
    report_path = tmp_path.joinpath('report.json')
    result = app_runner.invoke(args=args + ['--output', str(report_path)])
    return result, json.loads(report_path.read_text())


def test_outcome_status():
    outcome = _Outcome({})
    assert outcome.status == STATUS_OK
    outcome.indeterminate()
    assert outcome.status == STATUS_INDETERMINATE
    outcome.failed()
    outcome.indeterminate()
    assert outcome.status == STATUS_ERROR


def test_raw_inputs():
    assert _raw_inputs({'knot_text': 'unknot', 'degrees': (2, 3), 'witnesses_text': None}) == {
        'knot': 'unknot',
        'degrees': [2, 3],
    }


def test_format_text():
    assert _format_text({'b': [1, {'c': None}], 'a': True}) == ['a: true', 'b:', '  - 1', '  -', '    c: null']


@pytest.mark.usefixtures('app_runner')
def test_cli_branched_cover(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['branched-cover', '-k', 'twobridge(3,1)', '-d', '3'])
    assert result.exit_code == 0
    assert report['command'] == 'branched-cover'
    assert report['status'] == 'OK'
    assert report['inputs'] == {'knot': 'twobridge(3,1)', 'd': 3}
    assert report['results']['order'] == 8
    assert report['results']['homology_order'] == 4
    assert report['results']['abelianization']['torsion'] == [2, 2]
    assert 'timings' not in report['results']


@pytest.mark.usefixtures('app_runner')
def test_cli_branched_cover_text(app_runner):
    result = app_runner.invoke(args=['branched-cover', '-k', 'torus(2,5)', '-d', '2'])
    assert result.exit_code == 0
    assert 'command: branched-cover' in result.output
    assert 'order: 5' in result.output


@pytest.mark.usefixtures('app_runner')
def test_cli_branched_cover_indeterminate(app_runner, tmp_path):
    result, report = _invoke(
        app_runner, tmp_path, ['branched-cover', '-k', 'twobridge(3,1)', '-d', '6', '--max-cosets', '200']
    )
    assert result.exit_code == 2
    assert report['status'] == 'INDETERMINATE'
    assert report['results']['order'] == 'INDETERMINATE'
    assert report['results']['homology_order'] == 'INFINITE'


@pytest.mark.usefixtures('app_runner')
def test_cli_grammar_error(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['branched-cover', '-k', 'trefoil', '-d', '2'])
    assert result.exit_code == 1
    assert report['status'] == 'ERROR'
    assert report['results']['position'] == 0
    assert 'Unknown knot description' in report['results']['error']


@pytest.mark.usefixtures('app_runner')
def test_cli_invalid_degree(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['branched-cover', '-k', 'twobridge(3,1)', '-d', '1'])
    assert result.exit_code == 1
    assert report['status'] == 'ERROR'
    assert 'position' not in report['results']


@pytest.mark.usefixtures('app_runner')
def test_cli_rim_surgery(app_runner, tmp_path):
    result, report = _invoke(
        app_runner, tmp_path, ['rim-surgery', '-b', '<u | u^2>', '-m', 'u', '-s', '[(twobridge(5,3),2)]']
    )
    assert result.exit_code == 0
    assert report['inputs']['steps'] == [['twobridge(5,3)', 2]]
    assert report['results']['d'] == 2
    assert report['results']['order'] == 10
    assert report['results']['meridian_order'] == 2
    assert report['results']['trace'][0]['path'] == 'd-twist'
    assert report['results']['certification']['tier'] in ('T1', 'T2')


@pytest.mark.usefixtures('app_runner')
def test_cli_rim_surgery_no_steps(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['rim-surgery', '-b', '<u | u^3>', '-m', 'u'])
    assert result.exit_code == 0
    assert report['results']['order'] == 3
    assert report['results']['trace'] == []
    assert report['results']['certification'] is None


@pytest.mark.usefixtures('app_runner')
def test_cli_rim_surgery_json(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['rim-surgery', '-b', '<u | u^3>', '-m', 'u', '-f', 'json'])
    assert result.exit_code == 0
    assert result.exception is None
    assert report['status'] == 'OK'
    assert report['results']['meridian_order'] == 3
    assert '"meridian_order": 3' in result.output


@pytest.mark.usefixtures('app_runner')
def test_cli_rim_surgery_base_not_cyclic(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['rim-surgery', '-b', '<a,b | [a,b]>', '-m', 'a'])
    assert result.exit_code == 1
    assert 'not finite cyclic' in report['results']['error']


@pytest.mark.usefixtures('app_runner')
def test_cli_alexander(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['alexander', '-k', 'knot(4_1)', '-d', '2', '-d', '3'])
    assert result.exit_code == 0
    assert report['inputs']['degrees'] == [2, 3]
    assert report['results']['alexander']['polynomial'] == '1 - 3*t + t^2'
    assert report['results']['determinant'] == 5
    assert report['results']['cover_homology_orders'] == {'2': 5, '3': 16}


@pytest.mark.usefixtures('app_runner')
def test_cli_alexander_timings(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['alexander', '-k', 'twobridge(3,1)', '-d', '6', '--timings'])
    assert result.exit_code == 0
    assert report['results']['cover_homology_orders'] == {'6': 'INFINITE'}
    assert report['results']['timings']['total_seconds'] >= 0


@pytest.mark.usefixtures('app_runner')
def test_cli_distinguish(app_runner, tmp_path):
    result, report = _invoke(
        app_runner, tmp_path, ['distinguish', '-k', 'twobridge(3,1); torus(2,3); knot(4_1); mirror(knot(4_1))']
    )
    assert result.exit_code == 0
    assert report['results']['class_count'] == 2
    assert report['results']['classes'] == [['twobridge(3,1)', 'torus(2,3)'], ['knot(4_1)', 'mirror(knot(4_1))']]


@pytest.mark.usefixtures('app_runner')
def test_cli_kd(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['kd', '-g', '<r,s | r^5, s^2, s*r*s^-1*r>', '--gamma', 's'])
    assert result.exit_code == 0
    assert report['results']['kd']['status'] == 'HOLDS'
    assert report['results']['kd']['d'] == 2
    assert report['results']['witness_source'] == 'search'
    assert report['results']['witnesses'] == []
    assert report['results']['witnesses_certified'] is True


@pytest.mark.usefixtures('app_runner')
def test_cli_kd_fails(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['kd', '-g', '<a,b | [a,b]>', '--gamma', 'a'])
    assert result.exit_code == 0
    assert report['results']['kd']['status'] == 'FAILS'
    assert 'witnesses' not in report['results']


@pytest.mark.usefixtures('app_runner')
def test_cli_kd_wrong_witnesses(app_runner, tmp_path):
    result, report = _invoke(
        app_runner, tmp_path, ['kd', '-g', '<s,t | s^3*(s*t)^-2, s^3*t^-5>', '--gamma', 's', '-w', '[(s,s)]']
    )
    assert result.exit_code == 1
    assert report['status'] == 'ERROR'


@pytest.mark.usefixtures('app_runner')
def test_cli_symplectic(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['symplectic', '-g', '<x | x^6>', '--gamma', 'x'])
    assert result.exit_code == 0
    assert report['status'] == 'OK'
    assert report['results']['tier'] in ('T1', 'T2')
    assert report['results']['m_certification']['order'] == 1
    assert len(report['results']['notes']) == 2


@pytest.mark.usefixtures('app_runner')
def test_cli_symplectic_kd_fails(app_runner, tmp_path):
    result, report = _invoke(app_runner, tmp_path, ['symplectic', '-g', '<x | x^6>', '--gamma', 'x^2'])
    assert result.exit_code == 1
    assert report['results']['kd']['status'] == 'FAILS'
    assert report['results']['error'] == 'the group does not satisfy the normal generation condition'


@pytest.mark.usefixtures('app_runner')
def test_cli_report_schema(app_runner, tmp_path):
    _, report = _invoke(app_runner, tmp_path, ['kd', '-g', '<x | x^2>', '--gamma', 'x'])
    jsonschema_validate(instance=report, schema=_load_report_schema())
    assert sorted(report) == ['command', 'inputs', 'results', 'status']
