enum e { A, B };
int main() { }
